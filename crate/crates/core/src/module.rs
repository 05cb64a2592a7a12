//! Decomposition of finitely presented modules over the base ring into
//! direct sums of cyclic modules with local endomorphism rings, via Smith
//! normal form over the local principal ring `R_N`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{AdicScalar, Backend, RingDescriptor, INFINITE_VALUATION};

/// Sentinel returned by [`hom_block_shape`] for Hom between free rank-one
/// modules, where the block entry ranges over the whole base ring.
pub const FULL_RANK: usize = usize::MAX;

/// One cyclic summand with local endomorphism ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocalModule {
    /// `R/t^k`, `k >= 1`.
    Torsion(usize),
    /// Rank-one free module (pattern backend only).
    Free,
}

impl LocalModule {
    /// Length of the cyclic summand; `FULL_RANK` for a free one.
    pub fn length(&self) -> usize {
        match self {
            LocalModule::Torsion(k) => *k,
            LocalModule::Free => FULL_RANK,
        }
    }
}

/// The summand list: a finite ordered list, or countably many copies of the
/// free rank-one module (the pattern backend's `free^omega`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Summands {
    Finite(Vec<LocalModule>),
    FreeOmega,
}

/// `M = ⊕_z M_z` together with the partition of summand indices into
/// isomorphism classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposedModule {
    pub ring: RingDescriptor,
    pub summands: Summands,
}

impl DecomposedModule {
    pub fn finite(ring: RingDescriptor, summands: Vec<LocalModule>) -> Result<Self> {
        for s in &summands {
            match (ring.backend, s) {
                (Backend::Truncated, LocalModule::Torsion(k)) => {
                    if *k == 0 || *k > ring.precision {
                        return Err(Error::Invalid(format!(
                            "torsion exponent {k} outside 1..={}",
                            ring.precision
                        )));
                    }
                }
                (Backend::Pattern, LocalModule::Free) => {}
                (backend, s) => {
                    return Err(Error::Invalid(format!(
                        "summand {s:?} not supported by the {backend:?} backend"
                    )))
                }
            }
        }
        Ok(DecomposedModule { ring, summands: Summands::Finite(summands) })
    }

    /// `⊕_ω Free` over the pattern ring.
    pub fn free_omega(ring: RingDescriptor) -> Result<Self> {
        if ring.backend != Backend::Pattern {
            return Err(Error::BackendUnsupported(ring.backend));
        }
        Ok(DecomposedModule { ring, summands: Summands::FreeOmega })
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.summands, Summands::Finite(_))
    }

    pub fn finite_summands(&self) -> &[LocalModule] {
        match &self.summands {
            Summands::Finite(v) => v,
            Summands::FreeOmega => panic!("finite_summands() on an omega module"),
        }
    }

    pub fn rank(&self) -> usize {
        self.finite_summands().len()
    }

    /// Fibers of the iso-class map, in first-seen order. Each fiber is the
    /// list of summand indices of one isomorphism class.
    pub fn iso_classes(&self) -> Vec<Vec<usize>> {
        match &self.summands {
            Summands::Finite(v) => {
                let mut classes: Vec<(LocalModule, Vec<usize>)> = Vec::new();
                for (i, s) in v.iter().enumerate() {
                    if let Some(entry) = classes.iter_mut().find(|(c, _)| c == s) {
                        entry.1.push(i);
                    } else {
                        classes.push((*s, vec![i]));
                    }
                }
                classes.into_iter().map(|(_, f)| f).collect()
            }
            // a single class, indexed by omega; callers use is_finite() first
            Summands::FreeOmega => vec![Vec::new()],
        }
    }

    /// Total length `Σ k_i` of a finite truncated module. This bounds the
    /// nilpotency index of the radical of its endomorphism ring.
    pub fn total_length(&self) -> usize {
        self.finite_summands().iter().map(|s| s.length()).sum()
    }
}

/// `Hom(src, dst)` is cyclic; this is its length.
///
/// For `Torsion(a) -> Torsion(b)` it is `R/t^min(a,b)`, generated by
/// `x -> t^{max(0, b-a)} x`. `Free -> Free` is all of the base ring.
pub fn hom_block_shape(src: LocalModule, dst: LocalModule) -> usize {
    match (src, dst) {
        (LocalModule::Torsion(a), LocalModule::Torsion(b)) => a.min(b),
        (LocalModule::Free, LocalModule::Free) => FULL_RANK,
        (LocalModule::Torsion(_), LocalModule::Free) => 0,
        (LocalModule::Free, LocalModule::Torsion(b)) => b,
    }
}

/// `t`-exponent of the canonical generator of `Hom(src, dst)`.
pub fn hom_generator_exponent(src: LocalModule, dst: LocalModule) -> usize {
    match (src, dst) {
        (LocalModule::Torsion(a), LocalModule::Torsion(b)) => b.saturating_sub(a),
        _ => 0,
    }
}

/// Result of a Smith decomposition: `row_transform * presentation *
/// col_transform = diagonal`, both transforms invertible over `R_N`.
#[derive(Debug, Clone)]
pub struct SmithResult {
    pub module: DecomposedModule,
    pub diagonal: Vec<AdicScalar>,
    pub row_transform: Vec<Vec<AdicScalar>>,
    pub col_transform: Vec<Vec<AdicScalar>>,
}

fn mat_identity(ring: RingDescriptor, n: usize) -> Vec<Vec<AdicScalar>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { AdicScalar::one(ring) } else { AdicScalar::zero(ring) })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &[Vec<AdicScalar>], b: &[Vec<AdicScalar>]) -> Vec<Vec<AdicScalar>> {
    let rows = a.len();
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    let ring = *a[0][0].ring();
    (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    let mut acc = AdicScalar::zero(ring);
                    for k in 0..inner {
                        acc = acc.add(&a[i][k].mul(&b[k][j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Smith normal form of a presentation matrix over `R_N = F_p[t]/(t^N)`.
///
/// The module is `coker(presentation : R^cols -> R^rows)`. Pivoting picks
/// the entry of minimal valuation, ties broken by (row, column) order, so
/// the output is deterministic. Unit invariant factors contribute no
/// summand; zero diagonal entries (and surplus rows) contribute `R/t^N`.
///
/// ```
/// use endoring::module::{smith_decompose, LocalModule};
/// use endoring::scalar::{AdicScalar, RingDescriptor};
///
/// let ring = RingDescriptor::truncated(2, 4);
/// let m = vec![
///     vec![AdicScalar::parse(ring, "t").unwrap(), AdicScalar::parse(ring, "1").unwrap()],
///     vec![AdicScalar::parse(ring, "0").unwrap(), AdicScalar::parse(ring, "t").unwrap()],
/// ];
/// let smith = smith_decompose(&m, ring).unwrap();
/// // the unit entry absorbs one generator: R² / im ≅ R/t²
/// assert_eq!(smith.module.finite_summands(), &[LocalModule::Torsion(2)]);
/// ```
pub fn smith_decompose(
    presentation: &[Vec<AdicScalar>],
    ring: RingDescriptor,
) -> Result<SmithResult> {
    if ring.backend != Backend::Truncated {
        return Err(Error::BackendUnsupported(ring.backend));
    }
    let rows = presentation.len();
    let cols = presentation.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<AdicScalar>> = presentation.to_vec();
    for row in &a {
        if row.len() != cols {
            return Err(Error::Invalid("ragged presentation matrix".into()));
        }
        for entry in row {
            entry.ring().same_as(&ring)?;
        }
    }
    let mut p = mat_identity(ring, rows);
    let mut q = mat_identity(ring, cols);

    let n = rows.min(cols);
    for step in 0..n {
        // minimal-valuation pivot in the remaining block
        let mut best: Option<(usize, usize, usize)> = None;
        for i in step..rows {
            for j in step..cols {
                let v = a[i][j].valuation();
                if v == INFINITE_VALUATION {
                    continue;
                }
                if best.map_or(true, |(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let Some((_, pi, pj)) = best else {
            break; // remaining block is zero
        };
        if pi != step {
            a.swap(step, pi);
            p.swap(step, pi);
        }
        if pj != step {
            for row in a.iter_mut() {
                row.swap(step, pj);
            }
            for row in q.iter_mut() {
                row.swap(step, pj);
            }
        }
        let pivot = a[step][step].clone();
        // clear the column below/above and the row to the right
        for i in 0..rows {
            if i == step || a[i][step].is_zero() {
                continue;
            }
            let factor = a[i][step].divide_by(&pivot)?;
            for j in 0..cols {
                let delta = factor.mul(&a[step][j]);
                a[i][j] = a[i][j].sub(&delta);
            }
            for j in 0..rows {
                let delta = factor.mul(&p[step][j]);
                p[i][j] = p[i][j].sub(&delta);
            }
        }
        for j in 0..cols {
            if j == step || a[step][j].is_zero() {
                continue;
            }
            let factor = a[step][j].divide_by(&pivot)?;
            for i in 0..rows {
                let delta = a[i][step].mul(&factor);
                a[i][j] = a[i][j].sub(&delta);
            }
            for row in q.iter_mut() {
                let delta = row[step].mul(&factor);
                row[j] = row[j].sub(&delta);
            }
        }
    }

    let mut exponents: Vec<usize> = Vec::new();
    for i in 0..rows {
        let v = if i < cols { a[i][i].valuation() } else { INFINITE_VALUATION };
        let k = if v == INFINITE_VALUATION { ring.precision } else { v };
        if k > 0 {
            exponents.push(k);
        }
    }
    exponents.sort_unstable();
    let summands = exponents.into_iter().map(LocalModule::Torsion).collect();
    let diagonal = (0..n).map(|i| a[i][i].clone()).collect();
    Ok(SmithResult {
        module: DecomposedModule::finite(ring, summands)?,
        diagonal,
        row_transform: p,
        col_transform: q,
    })
}
