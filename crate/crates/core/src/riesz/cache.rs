//! Binary kernel cache.
//!
//! Layout (little endian): 8-byte magic `HCRIESZ1`, `u32 d`, `f64 alpha`,
//! `f64 beta`, `u64 N`, `f64 r_max`, `u8 grading tag`, `f64 grading power`,
//! then `N*N` row-major `f64` entries of the symmetric matrix.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use super::{build_riesz, RieszOperator};
use crate::error::{Error, Result};
use crate::grid::{Grading, RadialGrid};
use crate::params::ModelParams;

const MAGIC: &[u8; 8] = b"HCRIESZ1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CacheKey {
    pub d: u32,
    pub alpha: f64,
    pub beta: f64,
    pub n: u64,
    pub r_max: f64,
    pub grading: Grading,
}

pub fn cache_key(params: &ModelParams, grid: &RadialGrid) -> CacheKey {
    CacheKey {
        d: params.d,
        alpha: params.alpha,
        beta: params.beta(),
        n: grid.len() as u64,
        r_max: grid.r_max,
        grading: grid.grading,
    }
}

fn encode_key(key: &CacheKey) -> Vec<u8> {
    let mut out = Vec::with_capacity(64);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&key.d.to_le_bytes());
    out.extend_from_slice(&key.alpha.to_le_bytes());
    out.extend_from_slice(&key.beta.to_le_bytes());
    out.extend_from_slice(&key.n.to_le_bytes());
    out.extend_from_slice(&key.r_max.to_le_bytes());
    let (tag, power) = match key.grading {
        Grading::Uniform => (0u8, 1.0f64),
        Grading::Algebraic { power } => (1u8, power),
    };
    out.push(tag);
    out.extend_from_slice(&power.to_le_bytes());
    out
}

pub fn save_cache(op: &RieszOperator, path: &Path) -> Result<()> {
    let key = cache_key(&op.params, &op.grid);
    let mut bytes = encode_key(&key);
    bytes.reserve(op.matrix().len() * 8);
    for x in op.matrix() {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    let mut f = fs::File::create(path)?;
    f.write_all(&bytes)?;
    Ok(())
}

/// Reads a cached operator; fails when the stored key differs from the request.
pub fn load_cached(
    params: &ModelParams,
    grid: Arc<RadialGrid>,
    path: &Path,
) -> Result<RieszOperator> {
    let expected = encode_key(&cache_key(params, &grid));
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < expected.len() || &bytes[..8] != MAGIC {
        return Err(Error::Cache("not a kernel cache file".into()));
    }
    if bytes[..expected.len()] != expected[..] {
        return Err(Error::Cache(
            "cache key does not match the requested operator".into(),
        ));
    }
    let body = &bytes[expected.len()..];
    let n = grid.len();
    if body.len() != n * n * 8 {
        return Err(Error::Cache(format!(
            "expected {} matrix bytes, found {}",
            n * n * 8,
            body.len()
        )));
    }
    let matrix = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    RieszOperator::from_parts(*params, grid, matrix)
}

impl RieszOperator {
    /// Loads the operator from `path` when the key matches, otherwise
    /// assembles it and writes the cache.
    pub fn build_or_load(params: &ModelParams, grid: Arc<RadialGrid>, path: &Path) -> Result<Self> {
        if path.exists() {
            if let Ok(op) = load_cached(params, grid.clone(), path) {
                return Ok(op);
            }
        }
        let op = build_riesz(params, grid)?;
        save_cache(&op, path)?;
        Ok(op)
    }
}
