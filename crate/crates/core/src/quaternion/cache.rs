use super::classes::{right_ideal_classes, BrandtContext, BrandtMatrix, ClassSet};
use super::order::OrderLattice;
use super::qlattice::QLattice;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const CACHE_VERSION: u32 = 1;

/// On-disk record for one order: header `(q, level, order basis)`, then
/// the class set and any Brandt matrices keyed by `n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheFile {
    pub version: u32,
    pub q: u64,
    pub level: u64,
    pub order: QLattice,
    pub classes: ClassSet,
    pub brandt: BTreeMap<u64, BrandtMatrix>,
}

/// A directory of cache files, one per `(q, level)`.
#[derive(Debug, Clone)]
pub struct ClassCache {
    dir: PathBuf,
}

impl ClassCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn path_for(&self, q: u64, level: u64) -> PathBuf {
        self.dir.join(format!("classes_q{q}_level{level}.json"))
    }

    /// The cached record for `order`, if present and written for this order.
    pub fn load(&self, order: &OrderLattice) -> Result<Option<CacheFile>> {
        let path = self.path_for(order.algebra.q, order.level);
        if !path.exists() {
            return Ok(None);
        }
        let file = read_file(&path)?;
        if file.version != CACHE_VERSION || file.order != order.lattice || file.classes.order != *order {
            log::warn!("ignoring stale cache {}", path.display());
            return Ok(None);
        }
        Ok(Some(file))
    }

    pub fn store(&self, file: &CacheFile) -> Result<()> {
        let path = self.path_for(file.q, file.level);
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_vec(file)?)?;
        std::fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// Class set of `order`, from the cache or computed and stored.
    pub fn classes(&self, order: &OrderLattice) -> Result<ClassSet> {
        if let Some(file) = self.load(order)? {
            return Ok(file.classes);
        }
        let classes = right_ideal_classes(order)?;
        self.store(&CacheFile {
            version: CACHE_VERSION,
            q: order.algebra.q,
            level: order.level,
            order: order.lattice.clone(),
            classes: classes.clone(),
            brandt: BTreeMap::new(),
        })?;
        Ok(classes)
    }

    /// Brandt matrices `B(n)` for each `n`, filling in missing entries.
    pub fn brandt(&self, order: &OrderLattice, ns: &[u64]) -> Result<Vec<BrandtMatrix>> {
        let classes = self.classes(order)?;
        let mut file = self.load(order)?.ok_or_else(|| Error::Internal("cache vanished".into()))?;
        let missing: Vec<u64> = ns.iter().copied().filter(|n| !file.brandt.contains_key(n)).collect();
        if !missing.is_empty() {
            let ctx = BrandtContext::new(&classes)?;
            for n in missing {
                file.brandt.insert(n, ctx.matrix(n)?);
            }
            self.store(&file)?;
        }
        Ok(ns.iter().map(|n| file.brandt[n].clone()).collect())
    }
}

fn read_file(path: &Path) -> Result<CacheFile> {
    let bytes = std::fs::read(path)?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::{brandt_matrix, build_algebra, maximal_order};

    #[test]
    fn round_trip() {
        let dir = std::env::temp_dir().join(format!("shimura-cache-test-{}", std::process::id()));
        let cache = ClassCache::new(&dir).unwrap();
        let order = maximal_order(&build_algebra(23).unwrap()).unwrap();
        let first = cache.classes(&order).unwrap();
        let again = cache.classes(&order).unwrap();
        assert_eq!(first.weights(), again.weights());
        let b = cache.brandt(&order, &[2, 3]).unwrap();
        assert_eq!(b[1], brandt_matrix(&first, 3).unwrap());
        let reloaded = cache.load(&order).unwrap().unwrap();
        assert_eq!(reloaded.brandt.len(), 2);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
