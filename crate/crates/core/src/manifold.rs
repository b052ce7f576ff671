//! A loaded manifold: its index engine plus the slope coordinates it reports in.

use std::sync::Arc;

use crate::catalog;
use crate::error::Result;
use crate::gluing::ManifoldSpec;
use crate::index::{CuspedIndexer, IndexSource, SumOptions};
use crate::tetindex::TetIndexCache;

#[derive(Debug)]
pub struct Manifold {
    pub spec: ManifoldSpec,
    pub source: IndexSource,
    pub indexer: CuspedIndexer,
}

impl Manifold {
    pub fn new(spec: ManifoldSpec, tets: Arc<TetIndexCache>, options: SumOptions) -> Result<Self> {
        let source = IndexSource::from_spec(&spec)?;
        let indexer = CuspedIndexer::new(spec.name.clone(), &source, tets, options);
        Ok(Manifold { spec, source, indexer })
    }

    /// Loads `builtin:NAME` or a JSON file.
    pub fn load(uri: &str, tets: Arc<TetIndexCache>, options: SumOptions) -> Result<Self> {
        Self::new(catalog::load(uri)?, tets, options)
    }

    pub fn builtin(name: &str) -> Result<Self> {
        Self::new(catalog::builtin(name)?, Arc::default(), SumOptions::default())
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    /// Converts reported `(p, q)` to `(μ, λ)` coefficients.
    pub fn to_meridian_longitude(&self, p: i64, q: i64) -> (i64, i64) {
        let b = self.spec.slope_basis;
        (b[0][0] * p + b[0][1] * q, b[1][0] * p + b[1][1] * q)
    }
}
