//! FVEC feature files.
//!
//! Layout, all little-endian:
//!
//! | bytes    | content                                   |
//! |----------|-------------------------------------------|
//! | 0..4     | ASCII `FVEC`                              |
//! | 4..8     | `u32` format version (1)                  |
//! | 8..12    | `u32` row count                           |
//! | 12..16   | `u32` dimension                           |
//! | 16..     | `count * dim` IEEE-754 binary32, row-major |
//!
//! There is no checksum; truncation is detected from the declared shape.

use std::fs;
use std::path::Path;

use clinrel_core::FeatureSet;

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"FVEC";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 16;

pub fn encode(set: &FeatureSet) -> Result<Vec<u8>> {
    let narrow = |v: usize, what: &str| {
        u32::try_from(v).map_err(|_| Error::Format { path: set.id().into(), msg: format!("{what} {v} exceeds u32") })
    };
    let count = narrow(set.count(), "count")?;
    let dim = narrow(set.dim(), "dim")?;
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * set.data().len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&count.to_le_bytes());
    out.extend_from_slice(&dim.to_le_bytes());
    for v in set.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// Parses an FVEC byte buffer. `id` becomes the set's label.
pub fn decode(bytes: &[u8], id: &str, path: &Path) -> Result<FeatureSet> {
    let fail = |msg: String| Error::Format { path: path.to_path_buf(), msg };
    if bytes.len() < 4 || bytes[..4] != MAGIC {
        return Err(fail("bad magic".into()));
    }
    if bytes.len() < HEADER_LEN {
        return Err(fail(format!("truncated header: {} bytes", bytes.len())));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let version = word(4);
    if version != VERSION {
        return Err(fail(format!("unsupported version {version}")));
    }
    let (count, dim) = (word(8) as usize, word(12) as usize);
    let expected = count
        .checked_mul(dim)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| fail("declared shape overflows".into()))?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() < expected {
        return Err(fail(format!("truncated: expected {expected} bytes, found {}", payload.len())));
    }
    if payload.len() > expected {
        return Err(fail(format!("{} trailing bytes after payload", payload.len() - expected)));
    }
    let data = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(FeatureSet::new(id, count, dim, data)?)
}

pub fn write_feature_file(set: &FeatureSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode(set)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Loads a feature file; the set id is the file stem.
pub fn load_feature_file(path: impl AsRef<Path>) -> Result<FeatureSet> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    decode(&bytes, &id, path)
}

/// Reads only the header: `(count, dim)`.
pub fn read_header(path: impl AsRef<Path>) -> Result<(usize, usize)> {
    use std::io::Read;
    let path = path.as_ref();
    let mut buf = [0u8; HEADER_LEN];
    let mut f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    f.read_exact(&mut buf).map_err(|e| Error::io(path, e))?;
    if buf[..4] != MAGIC {
        return Err(Error::Format { path: path.into(), msg: "bad magic".into() });
    }
    let word = |i: usize| u32::from_le_bytes(buf[i..i + 4].try_into().unwrap()) as usize;
    Ok((word(8), word(12)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_file_is_20_bytes() {
        let set = FeatureSet::new("z", 1, 1, vec![0.0]).unwrap();
        let bytes = encode(&set).unwrap();
        assert_eq!(bytes.len(), 20);
        // 4 magic + 3 u32 header words + one f32.
        assert_eq!(&bytes[..4], b"FVEC");
        assert_eq!(&bytes[4..8], &[1, 0, 0, 0]);
        assert_eq!(&bytes[8..16], &[1, 0, 0, 0, 1, 0, 0, 0]);
        assert_eq!(&bytes[16..], &[0, 0, 0, 0]);
    }

    #[test]
    fn bad_magic() {
        let mut bytes = encode(&FeatureSet::new("z", 1, 2, vec![1.0, 2.0]).unwrap()).unwrap();
        bytes[0] = b'X';
        let err = decode(&bytes, "z", Path::new("z.fvec")).unwrap_err();
        assert!(err.to_string().ends_with("bad magic"), "{err}");
    }

    #[test]
    fn truncated_payload() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"FVEC");
        for w in [1u32, 2, 3] {
            bytes.extend_from_slice(&w.to_le_bytes());
        }
        bytes.extend_from_slice(&[0u8; 20]);
        let err = decode(&bytes, "t", Path::new("t.fvec")).unwrap_err();
        assert!(err.to_string().contains("truncated: expected 24 bytes"), "{err}");
    }

    #[test]
    fn non_finite_payload_is_rejected() {
        let mut bytes = encode(&FeatureSet::new("z", 2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap()).unwrap();
        bytes[HEADER_LEN + 12..].copy_from_slice(&f32::INFINITY.to_le_bytes());
        let err = decode(&bytes, "z", Path::new("z.fvec")).unwrap_err();
        assert_eq!(err.to_string(), "non-finite value at (1,1)");
    }

    #[test]
    fn zero_count_is_rejected() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"FVEC");
        for w in [1u32, 0, 4] {
            bytes.extend_from_slice(&w.to_le_bytes());
        }
        assert!(decode(&bytes, "e", Path::new("e.fvec")).is_err());
    }
}
