//! Seeded random smooth fields for property checks.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{AngularKind, Grid, ScalarField};
use crate::slice::{max_q, spacelike_q, Form};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random polynomial of degree <= 3 in the coordinates the grid can
/// represent (`z` and `r^2` on a meridian grid).
pub fn random_polynomial(grid: &Arc<Grid>, rng: &mut impl Rng) -> ScalarField {
    let kind = grid.kind();
    let mut terms: Vec<([i32; 3], f64)> = Vec::new();
    for a in 0..=3 {
        for b in 0..=3 - a {
            for c in 0..=3 - a - b {
                let keep = match kind {
                    AngularKind::Circle => c == 0,
                    // a counts powers of x^2 + y^2
                    AngularKind::Meridian => b == 0 && 2 * a + c <= 3,
                    AngularKind::Sphere => true,
                };
                if keep && a + b + c > 0 {
                    terms.push(([a, b, c], rng.gen_range(-1.0..1.0)));
                }
            }
        }
    }
    ScalarField::from_fn(grid, |n| {
        let [x, y, z] = n.x;
        terms
            .iter()
            .map(|&([a, b, c], k)| match kind {
                AngularKind::Meridian => k * (x * x + y * y).powi(a) * z.powi(c),
                _ => k * x.powi(a) * y.powi(b) * z.powi(c),
            })
            .sum()
    })
}

/// Random smooth field rescaled so that its largest interior `q` (for the
/// maximal-slice equation) equals `target_q`.
pub fn random_spacelike_field(grid: &Arc<Grid>, rng: &mut impl Rng, target_q: f64) -> Result<ScalarField> {
    if !(target_q > 0.0 && target_q < 1.0) {
        return Err(Error::InvalidInput(format!("target q = {target_q} outside (0, 1)")));
    }
    let f = random_polynomial(grid, rng);
    let q = max_q(&spacelike_q(&f, Form::Maximal));
    if !(q > 0.0) {
        return Ok(f);
    }
    Ok(f.scaled((target_q / q).sqrt()))
}
