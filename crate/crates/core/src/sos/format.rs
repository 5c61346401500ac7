//! Binary vertex-set files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic    b"SOSV"
//! version  u16 (1)
//! label    u8 length, UTF-8 bytes
//! k        u32
//! count    u64
//! dim      u32
//! rows     count * dim  i32, doubled coordinates, sorted lexicographically
//! ```

use std::io::{Read, Write};

use super::{SosError, VertexSet};
use crate::roots::RootVector;

pub const VERTEX_SET_MAGIC: &[u8; 4] = b"SOSV";
const VERSION: u16 = 1;

pub fn write_vertex_set<W: Write>(vs: &VertexSet, mut out: W) -> Result<(), SosError> {
    let label = vs.system.to_string();
    out.write_all(VERTEX_SET_MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&[label.len() as u8])?;
    out.write_all(label.as_bytes())?;
    out.write_all(&(vs.k as u32).to_le_bytes())?;
    out.write_all(&(vs.vectors.len() as u64).to_le_bytes())?;
    out.write_all(&(vs.dim as u32).to_le_bytes())?;
    let mut row = Vec::with_capacity(vs.dim * 4);
    for v in &vs.vectors {
        row.clear();
        for c in v.to_vec() {
            row.extend_from_slice(&c.to_le_bytes());
        }
        out.write_all(&row)?;
    }
    Ok(())
}

pub fn read_vertex_set<R: Read>(mut input: R) -> Result<VertexSet, SosError> {
    let bad = |m: &str| SosError::Format(m.to_string());
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != VERTEX_SET_MAGIC {
        return Err(bad("bad magic"));
    }
    let version = u16::from_le_bytes(read_array(&mut input)?);
    if version != VERSION {
        return Err(SosError::Format(format!("unsupported version {version}")));
    }
    let [label_len] = read_array::<1>(&mut input)?;
    let mut label = vec![0u8; label_len as usize];
    input.read_exact(&mut label)?;
    let label = String::from_utf8(label).map_err(|_| bad("label is not UTF-8"))?;
    let system = label.parse().map_err(|e| SosError::Format(format!("{e}")))?;
    let k = u32::from_le_bytes(read_array(&mut input)?) as usize;
    let count = u64::from_le_bytes(read_array(&mut input)?) as usize;
    let dim = u32::from_le_bytes(read_array(&mut input)?) as usize;
    let mut vectors = Vec::with_capacity(count.min(1 << 20));
    let mut coords = vec![0i32; dim];
    for _ in 0..count {
        for c in coords.iter_mut() {
            *c = i32::from_le_bytes(read_array(&mut input)?);
        }
        vectors.push(RootVector::new(&coords).map_err(|e| SosError::Format(format!("{e}")))?);
    }
    if !vectors.windows(2).all(|w| w[0] < w[1]) {
        return Err(bad("rows not strictly sorted"));
    }
    Ok(VertexSet {
        system,
        k,
        dim,
        vectors,
        multiplicity: None,
    })
}

pub(crate) fn read_array<const N: usize>(input: &mut impl Read) -> std::io::Result<[u8; N]> {
    let mut buf = [0u8; N];
    input.read_exact(&mut buf)?;
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::{build_root_system, RootSystemKind};
    use crate::sos::vertex_set;

    #[test]
    fn round_trip_is_byte_identical() {
        let rs = build_root_system(RootSystemKind::F4).unwrap();
        let vs = vertex_set(&rs, 2).unwrap();
        let mut bytes = Vec::new();
        write_vertex_set(&vs, &mut bytes).unwrap();
        let back = read_vertex_set(bytes.as_slice()).unwrap();
        assert_eq!(back.vectors, vs.vectors);
        assert_eq!((back.system, back.k, back.dim), (RootSystemKind::F4, 2, 4));
        let mut again = Vec::new();
        write_vertex_set(&back, &mut again).unwrap();
        assert_eq!(bytes, again);
    }

    #[test]
    fn header_layout_is_fixed() {
        let rs = build_root_system(RootSystemKind::A(1)).unwrap();
        let vs = vertex_set(&rs, 1).unwrap();
        let mut bytes = Vec::new();
        write_vertex_set(&vs, &mut bytes).unwrap();
        let expected_header: Vec<u8> = [
            &b"SOSV"[..],
            &[1, 0],
            &[2, b'A', b'1'],
            &[1, 0, 0, 0],
            &[2, 0, 0, 0, 0, 0, 0, 0],
            &[2, 0, 0, 0],
        ]
        .concat();
        assert_eq!(&bytes[..expected_header.len()], expected_header.as_slice());
        // first row is (-2, 2)
        assert_eq!(&bytes[expected_header.len()..][..8], &[0xfe, 0xff, 0xff, 0xff, 2, 0, 0, 0]);
        assert_eq!(bytes.len(), expected_header.len() + 2 * 2 * 4);
    }

    #[test]
    fn truncated_file_fails() {
        let rs = build_root_system(RootSystemKind::G2).unwrap();
        let vs = vertex_set(&rs, 1).unwrap();
        let mut bytes = Vec::new();
        write_vertex_set(&vs, &mut bytes).unwrap();
        bytes.truncate(bytes.len() - 3);
        assert!(read_vertex_set(bytes.as_slice()).is_err());
        assert!(read_vertex_set(&b"XXXX"[..]).is_err());
    }
}
