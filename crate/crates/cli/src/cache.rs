//! On-disk cache of vertex sets and graphs, keyed by system and `k`.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};
use sosgraph::graph::{build_gamma_from, read_graph, serialize, BuildOptions, Gamma, SosGraph};
use sosgraph::sos::{read_vertex_set, vertex_set, write_vertex_set, VertexSet};
use sosgraph::{RootSystem, RootSystemKind};

pub const CACHE_ENV: &str = "SOSGRAPH_CACHE_DIR";

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

/// A cached artefact with the SHA-256 of its file.
#[derive(Debug)]
pub struct Cached<T> {
    pub value: T,
    pub path: PathBuf,
    pub sha256: String,
    /// Loaded from disk rather than computed.
    pub reused: bool,
}

/// Writes through a temporary file so readers never see a partial file.
fn write_atomic(path: &Path, write: impl FnOnce(&mut BufWriter<fs::File>) -> Result<()>) -> Result<()> {
    let tmp = path.with_extension("partial");
    let mut out = BufWriter::new(fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?);
    write(&mut out)?;
    out.into_inner()
        .map_err(|e| e.into_error())?
        .sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}

impl Cache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).with_context(|| format!("creating cache directory {}", dir.display()))?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn vertex_path(&self, kind: RootSystemKind, k: usize) -> PathBuf {
        self.dir.join(format!("{kind}_k{k}.sosv"))
    }

    pub fn graph_path(&self, kind: RootSystemKind, k: usize) -> PathBuf {
        self.dir.join(format!("{kind}_k{k}.sosg"))
    }

    /// The vertex set of `Γ(rs, k)`, from the cache when its file parses and
    /// matches, otherwise computed and stored.
    pub fn vertex_set(&self, rs: &RootSystem, k: usize) -> Result<Cached<VertexSet>> {
        let path = self.vertex_path(rs.kind(), k);
        if let Ok(bytes) = fs::read(&path) {
            if let Ok(vs) = read_vertex_set(bytes.as_slice()) {
                if vs.system == rs.kind() && vs.k == k {
                    return Ok(Cached {
                        value: vs,
                        path,
                        sha256: hex::encode(Sha256::digest(&bytes)),
                        reused: true,
                    });
                }
            }
        }
        let vs = vertex_set(rs, k)?;
        let mut bytes = Vec::new();
        write_vertex_set(&vs, &mut bytes)?;
        write_atomic(&path, |out| {
            std::io::Write::write_all(out, &bytes)?;
            Ok(())
        })?;
        Ok(Cached {
            value: vs,
            path,
            sha256: hex::encode(Sha256::digest(&bytes)),
            reused: false,
        })
    }

    /// The implicit graph on the cached vertex set.
    pub fn gamma(&self, rs: &RootSystem, k: usize) -> Result<(Gamma, String)> {
        let vs = self.vertex_set(rs, k)?;
        Ok((Gamma::new(vs.value), vs.sha256))
    }

    /// The materialized graph; a valid cached file is reused unchanged.
    pub fn graph(&self, rs: &RootSystem, k: usize, opts: &BuildOptions) -> Result<Cached<SosGraph>> {
        let path = self.graph_path(rs.kind(), k);
        if let Ok(file) = fs::File::open(&path) {
            if let Ok((g, digest)) = read_graph(std::io::BufReader::new(file)) {
                if g.system == rs.kind() && g.k == k {
                    return Ok(Cached {
                        value: g,
                        path,
                        sha256: hex::encode(digest),
                        reused: true,
                    });
                }
            }
        }
        let (gamma, _) = self.gamma(rs, k)?;
        let mut opts = opts.clone();
        opts.spill_dir.get_or_insert_with(|| self.dir.join("spill"));
        let g = build_gamma_from(&gamma, &opts)?;
        let tmp = path.with_extension("partial");
        let digest = serialize(&g, &tmp)?;
        fs::rename(&tmp, &path)?;
        Ok(Cached {
            value: g,
            path,
            sha256: hex::encode(digest),
            reused: false,
        })
    }
}
