//! In-memory embedding matrices.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A `count x dim` row-major matrix of finite single-precision embeddings.
///
/// Construction validates the shape and rejects NaN/Inf, so every
/// `FeatureSet` in circulation satisfies its invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    id: String,
    count: usize,
    dim: usize,
    data: Vec<f32>,
}

impl FeatureSet {
    pub fn new(id: impl Into<String>, count: usize, dim: usize, data: Vec<f32>) -> Result<Self> {
        if count == 0 || dim == 0 {
            return Err(Error::EmptySet { count, dim });
        }
        let expected = count
            .checked_mul(dim)
            .ok_or(Error::ShapeMismatch { len: data.len(), expected: usize::MAX })?;
        if data.len() != expected {
            return Err(Error::ShapeMismatch { len: data.len(), expected });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: pos / dim, col: pos % dim });
        }
        Ok(Self { id: id.into(), count, dim, data })
    }

    /// Builds a set from equally sized rows.
    pub fn from_rows<R: AsRef<[f32]>>(id: impl Into<String>, rows: &[R]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::DimMismatch { left: dim, right: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::new(id, rows.len(), dim, data)
    }

    /// Stacks sets vertically, in order. All parts must share `dim`.
    pub fn concat(id: impl Into<String>, parts: &[&FeatureSet]) -> Result<Self> {
        let first = parts.first().ok_or(Error::Empty("no feature sets to concatenate"))?;
        let dim = first.dim;
        let mut data = Vec::with_capacity(parts.iter().map(|p| p.data.len()).sum());
        let mut count = 0;
        for p in parts {
            if p.dim != dim {
                return Err(Error::DimMismatch { left: dim, right: p.dim });
            }
            data.extend_from_slice(&p.data);
            count += p.count;
        }
        Self::new(id, count, dim, data)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f32]> + '_ {
        self.data.chunks_exact(self.dim)
    }
}
