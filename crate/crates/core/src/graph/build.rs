use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Gamma, GraphError, SosGraph};
use crate::roots::{RootSystem, RootSystemKind};
use crate::sos::format::read_array;

/// Tuning for [`build_gamma`].
#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// Vertex-index block edge length for the pairwise scan.
    pub block_size: usize,
    /// Above this many vertex pairs, edges are streamed to a spill file
    /// instead of being collected in memory.
    pub spill_threshold_pairs: u64,
    /// Where spill files and checkpoints go; the system temp dir when unset.
    pub spill_dir: Option<PathBuf>,
    /// Refuse to assemble an adjacency structure larger than this.
    pub max_memory_bytes: Option<u64>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            block_size: 4096,
            spill_threshold_pairs: 200_000_000,
            spill_dir: None,
            max_memory_bytes: None,
        }
    }
}

/// Progress record of a spilled edge scan; lets an interrupted build resume.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub system: RootSystemKind,
    pub k: usize,
    pub n: usize,
    pub block_size: usize,
    pub completed_row_blocks: usize,
    pub spill_path: PathBuf,
    pub spill_bytes: u64,
}

impl Checkpoint {
    fn matches(&self, g: &Gamma, block_size: usize) -> bool {
        self.system == g.system() && self.k == g.k() && self.n == g.vectors.len() && self.block_size == block_size
    }
}

impl Gamma {
    /// Edges `(u, v)`, `u < v`, with `u` in row block `bi`, in scan order.
    fn row_block_edges(&self, bi: usize, block_size: usize) -> Vec<(u32, u32)> {
        let n = self.vectors.len();
        let rows = bi * block_size..((bi + 1) * block_size).min(n);
        let mut out = Vec::new();
        for bj in bi..n.div_ceil(block_size) {
            let cols = bj * block_size..((bj + 1) * block_size).min(n);
            self.scan_block(rows.clone(), cols, |u, v| out.push((u, v)));
        }
        out
    }
}

pub fn build_gamma(rs: &RootSystem, k: usize, opts: &BuildOptions) -> Result<SosGraph, GraphError> {
    let gamma = Gamma::from_system(rs, k)?;
    build_gamma_from(&gamma, opts)
}

/// Materializes the adjacency of `gamma`. The result does not depend on the
/// block size or on whether edges went through a spill file.
pub fn build_gamma_from(gamma: &Gamma, opts: &BuildOptions) -> Result<SosGraph, GraphError> {
    let n = gamma.vectors.len();
    let block_size = opts.block_size.max(1);
    let row_blocks = n.div_ceil(block_size);

    if gamma.pair_count() <= opts.spill_threshold_pairs {
        let blocks: Vec<Vec<(u32, u32)>> = (0..row_blocks)
            .into_par_iter()
            .map(|bi| gamma.row_block_edges(bi, block_size))
            .collect();
        let m: u64 = blocks.iter().map(|b| b.len() as u64).sum();
        check_budget(n, m, opts, None)?;
        return assemble(gamma, m, |sink| {
            blocks.iter().flatten().for_each(|&(u, v)| sink(u, v));
            Ok(())
        });
    }

    let dir = opts.spill_dir.clone().unwrap_or_else(std::env::temp_dir);
    fs::create_dir_all(&dir)?;
    let stem = format!("{}_k{}", gamma.system(), gamma.k());
    let spill_path = dir.join(format!("{stem}.edges"));
    let ckpt_path = dir.join(format!("{stem}.edges.ckpt.json"));

    let mut ckpt = match read_checkpoint(&ckpt_path) {
        Some(c) if c.matches(gamma, block_size) && c.spill_path == spill_path => c,
        _ => Checkpoint {
            system: gamma.system(),
            k: gamma.k(),
            n,
            block_size,
            completed_row_blocks: 0,
            spill_path: spill_path.clone(),
            spill_bytes: 0,
        },
    };
    let file = OpenOptions::new()
        .create(true)
        .write(true)
        .truncate(false)
        .open(&spill_path)?;
    file.set_len(ckpt.spill_bytes)?;
    let mut out = BufWriter::new(file);
    use std::io::Seek;
    out.seek(std::io::SeekFrom::End(0))?;

    let chunk = rayon::current_num_threads().max(1);
    while ckpt.completed_row_blocks < row_blocks {
        let end = (ckpt.completed_row_blocks + chunk).min(row_blocks);
        let blocks: Vec<Vec<(u32, u32)>> = (ckpt.completed_row_blocks..end)
            .into_par_iter()
            .map(|bi| gamma.row_block_edges(bi, block_size))
            .collect();
        for (u, v) in blocks.into_iter().flatten() {
            out.write_all(&u.to_le_bytes())?;
            out.write_all(&v.to_le_bytes())?;
        }
        out.flush()?;
        ckpt.spill_bytes = out.get_ref().metadata()?.len();
        ckpt.completed_row_blocks = end;
        write_checkpoint(&ckpt_path, &ckpt)?;
    }
    drop(out);

    let m = ckpt.spill_bytes / 8;
    check_budget(n, m, opts, Some(&ckpt))?;
    let graph = assemble(gamma, m, |sink| {
        let mut input = BufReader::with_capacity(1 << 20, File::open(&spill_path)?);
        for _ in 0..m {
            let u = u32::from_le_bytes(read_array(&mut input)?);
            let v = u32::from_le_bytes(read_array(&mut input)?);
            sink(u, v);
        }
        Ok(())
    })?;
    fs::remove_file(&spill_path)?;
    fs::remove_file(&ckpt_path)?;
    Ok(graph)
}

fn check_budget(n: usize, m: u64, opts: &BuildOptions, ckpt: Option<&Checkpoint>) -> Result<(), GraphError> {
    let Some(limit) = opts.max_memory_bytes else {
        return Ok(());
    };
    let needed = (n as u64 + 1) * 8 + 2 * m * 4 + n as u64 * 8;
    if needed > limit {
        return Err(GraphError::ResourceExhausted {
            detail: format!("adjacency for {n} vertices and {m} edges needs {needed} bytes, limit {limit}"),
            checkpoint: ckpt.cloned(),
        });
    }
    Ok(())
}

fn read_checkpoint(path: &Path) -> Option<Checkpoint> {
    let mut s = String::new();
    File::open(path).ok()?.read_to_string(&mut s).ok()?;
    serde_json::from_str(&s).ok()
}

fn write_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<(), GraphError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, serde_json::to_vec_pretty(ckpt).expect("checkpoint serializes"))?;
    fs::rename(tmp, path)?;
    Ok(())
}

/// Two passes over the edge stream: degrees, then placement. Rows are sorted at the end.
fn assemble(
    gamma: &Gamma,
    m: u64,
    stream: impl Fn(&mut dyn FnMut(u32, u32)) -> Result<(), GraphError>,
) -> Result<SosGraph, GraphError> {
    let n = gamma.vectors.len();
    let mut degree = vec![0u64; n];
    stream(&mut |u, v| {
        degree[u as usize] += 1;
        degree[v as usize] += 1;
    })?;
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0u64);
    for d in &degree {
        offsets.push(offsets.last().unwrap() + d);
    }
    debug_assert_eq!(*offsets.last().unwrap(), 2 * m);
    let mut neighbors = vec![0u32; (2 * m) as usize];
    let mut cursor: Vec<u64> = offsets[..n].to_vec();
    stream(&mut |u, v| {
        neighbors[cursor[u as usize] as usize] = v;
        cursor[u as usize] += 1;
        neighbors[cursor[v as usize] as usize] = u;
        cursor[v as usize] += 1;
    })?;

    let mut rows: Vec<&mut [u32]> = Vec::with_capacity(n);
    let mut rest = neighbors.as_mut_slice();
    for d in &degree {
        let (row, tail) = rest.split_at_mut(*d as usize);
        rows.push(row);
        rest = tail;
    }
    rows.par_iter_mut().for_each(|r| r.sort_unstable());

    SosGraph::from_csr(gamma.system(), gamma.k(), gamma.vectors.clone(), offsets, neighbors)
}
