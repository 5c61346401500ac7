//! Binary graph files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic      b"SOSG"
//! version    u16 (1)
//! label      u8 length, UTF-8 bytes
//! k          u32
//! n          u64
//! m          u64
//! dim        u32
//! vertices   n * dim  i32   doubled coordinates, sorted
//! offsets    (n + 1)  u64   compressed row offsets
//! neighbors  2m       u32   sorted within each row
//! checksum   32 bytes       SHA-256 of everything above
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{GraphError, SosGraph};
use crate::roots::{RootSystemKind, RootVector};

pub const GRAPH_MAGIC: &[u8; 4] = b"SOSG";
const VERSION: u16 = 1;

struct HashingWriter<W> {
    inner: W,
    hasher: Sha256,
}

impl<W: Write> Write for HashingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

struct HashingReader<R> {
    inner: R,
    hasher: Sha256,
}

impl<R: Read> Read for HashingReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }
}

/// Writes the graph and returns its checksum.
pub fn write_graph<W: Write>(g: &SosGraph, out: W) -> Result<[u8; 32], GraphError> {
    let mut w = HashingWriter {
        inner: out,
        hasher: Sha256::new(),
    };
    let label = g.system.to_string();
    w.write_all(GRAPH_MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[label.len() as u8])?;
    w.write_all(label.as_bytes())?;
    w.write_all(&(g.k as u32).to_le_bytes())?;
    w.write_all(&(g.vertices.len() as u64).to_le_bytes())?;
    w.write_all(&g.edge_count().to_le_bytes())?;
    w.write_all(&(g.dim as u32).to_le_bytes())?;
    for v in &g.vertices {
        for c in v.to_vec() {
            w.write_all(&c.to_le_bytes())?;
        }
    }
    for o in g.offsets() {
        w.write_all(&o.to_le_bytes())?;
    }
    for x in g.raw_neighbors() {
        w.write_all(&x.to_le_bytes())?;
    }
    let digest: [u8; 32] = w.hasher.finalize().into();
    let mut out = w.inner;
    out.write_all(&digest)?;
    out.flush()?;
    Ok(digest)
}

/// Reads and verifies a graph; returns it with its checksum.
pub fn read_graph<R: Read>(input: R) -> Result<(SosGraph, [u8; 32]), GraphError> {
    let mut r = HashingReader {
        inner: input,
        hasher: Sha256::new(),
    };
    let truncated = |e: std::io::Error| {
        if e.kind() == ErrorKind::UnexpectedEof {
            GraphError::Checksum("file truncated".into())
        } else {
            GraphError::Io(e)
        }
    };
    macro_rules! read {
        ($t:ty) => {{
            let mut b = [0u8; std::mem::size_of::<$t>()];
            r.read_exact(&mut b).map_err(truncated)?;
            <$t>::from_le_bytes(b)
        }};
    }
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(truncated)?;
    if &magic != GRAPH_MAGIC {
        return Err(GraphError::Format("bad magic".into()));
    }
    let version = read!(u16);
    if version != VERSION {
        return Err(GraphError::Version(version));
    }
    let label_len = read!(u8);
    let mut label = vec![0u8; label_len as usize];
    r.read_exact(&mut label).map_err(truncated)?;
    let system: RootSystemKind = String::from_utf8(label)
        .map_err(|_| GraphError::Format("label is not UTF-8".into()))?
        .parse()?;
    let k = read!(u32) as usize;
    let n = read!(u64) as usize;
    let m = read!(u64);
    let dim = read!(u32) as usize;
    if dim != system.ambient_dim() {
        return Err(GraphError::Format(format!("dimension {dim} does not match {system}")));
    }
    let mut vertices = Vec::with_capacity(n.min(1 << 24));
    let mut coords = vec![0i32; dim];
    for _ in 0..n {
        for c in coords.iter_mut() {
            *c = read!(i32);
        }
        vertices.push(RootVector::new(&coords)?);
    }
    let mut offsets = Vec::with_capacity((n + 1).min(1 << 24));
    for _ in 0..=n {
        offsets.push(read!(u64));
    }
    let mut neighbors = Vec::with_capacity((2 * m).min(1 << 28) as usize);
    for _ in 0..2 * m {
        neighbors.push(read!(u32));
    }
    let digest: [u8; 32] = r.hasher.finalize().into();
    let mut stored = [0u8; 32];
    r.inner.read_exact(&mut stored).map_err(truncated)?;
    if stored != digest {
        return Err(GraphError::Checksum("digest mismatch".into()));
    }
    let g = SosGraph::from_csr(system, k, vertices, offsets, neighbors)?;
    Ok((g, digest))
}

pub fn serialize(g: &SosGraph, path: &Path) -> Result<[u8; 32], GraphError> {
    let file = File::create(path)?;
    write_graph(g, BufWriter::with_capacity(1 << 20, file))
}

pub fn deserialize(path: &Path) -> Result<SosGraph, GraphError> {
    let file = File::open(path)?;
    Ok(read_graph(BufReader::with_capacity(1 << 20, file))?.0)
}
