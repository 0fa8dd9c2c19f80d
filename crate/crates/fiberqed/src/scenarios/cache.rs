//! Memoized guided-mode eigensolutions, keyed by fiber geometry and
//! frequency rounded to 1e-12 relative.

use crate::guided::{solve_eigenvalue, FiberSpec, GuidedModeSolution};
use crate::Result;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct CacheKey {
    radius_bits: u64,
    n1_bits: u64,
    n2_bits: u64,
    omega_exp: i32,
    omega_mant: u64,
}

fn key_for(fiber: &FiberSpec, omega: f64) -> CacheKey {
    // 12 significant digits of omega (1e-12 relative rounding)
    let exp = omega.abs().log10().floor() as i32;
    let mant = omega / 10f64.powi(exp);
    CacheKey {
        radius_bits: fiber.radius.to_bits(),
        n1_bits: fiber.n1.to_bits(),
        n2_bits: fiber.n2.to_bits(),
        omega_exp: exp,
        omega_mant: (mant * 1e11).round() as u64,
    }
}

/// Single-writer memo cache for eigenmode solutions. Disabled caches solve
/// fresh every time and give identical results.
pub struct ModeCache {
    enabled: bool,
    map: Mutex<HashMap<CacheKey, Arc<GuidedModeSolution>>>,
}

impl ModeCache {
    pub fn new(enabled: bool) -> Self {
        ModeCache {
            enabled,
            map: Mutex::new(HashMap::new()),
        }
    }

    pub fn solve(&self, fiber: &FiberSpec, omega: f64) -> Result<Arc<GuidedModeSolution>> {
        if !self.enabled {
            return Ok(Arc::new(solve_eigenvalue(fiber, omega)?));
        }
        let key = key_for(fiber, omega);
        if let Some(hit) = self.map.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let solved = Arc::new(solve_eigenvalue(fiber, omega)?);
        self.map
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| solved.clone());
        Ok(solved)
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for ModeCache {
    fn default() -> Self {
        ModeCache::new(true)
    }
}
