//! Row-finite `ω x ω` matrices in banded form.
//!
//! A matrix is a finite list of bands (a diagonal offset `d`, a single entry
//! repeated from a start row) plus a finite sparse perturbation list. The
//! value at `(j, i)` is the *sum* of all band and sparse contributions, which
//! keeps addition and multiplication closed on the representation. Every row
//! has support bounded by the number of bands plus sparse entries, so
//! row-finiteness holds by construction.

use std::collections::BTreeMap;

use crate::scalar::{AdicScalar, RingDescriptor};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Band {
    /// Column minus row.
    pub offset: i64,
    pub entry: AdicScalar,
    /// First row on which the band is present.
    pub from: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternMatrix {
    pub ring: RingDescriptor,
    pub bands: Vec<Band>,
    /// `(row, col, entry)` perturbations.
    pub sparse: Vec<(usize, usize, AdicScalar)>,
}

/// Canonical form: per offset, the eventual band entry together with the row
/// it stabilizes from, plus an explicit finite table of deviating positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalPattern {
    /// offset -> (entry, from); entry is nonzero.
    pub bands: BTreeMap<i64, (AdicScalar, usize)>,
    /// (row, col) -> nonzero entry, for positions not explained by a band.
    pub sparse: BTreeMap<(usize, usize), AdicScalar>,
}

impl PatternMatrix {
    pub fn zero(ring: RingDescriptor) -> Self {
        PatternMatrix { ring, bands: Vec::new(), sparse: Vec::new() }
    }

    pub fn identity(ring: RingDescriptor) -> Self {
        PatternMatrix {
            ring,
            bands: vec![Band { offset: 0, entry: AdicScalar::one(ring), from: 0 }],
            sparse: Vec::new(),
        }
    }

    pub fn band(ring: RingDescriptor, offset: i64, entry: AdicScalar, from: usize) -> Self {
        PatternMatrix { ring, bands: vec![Band { offset, entry, from }], sparse: Vec::new() }
    }

    pub fn from_sparse(ring: RingDescriptor, sparse: Vec<(usize, usize, AdicScalar)>) -> Self {
        PatternMatrix { ring, bands: Vec::new(), sparse }
    }

    /// Scale every entry.
    pub fn scale(&self, c: &AdicScalar) -> Self {
        PatternMatrix {
            ring: self.ring,
            bands: self
                .bands
                .iter()
                .map(|b| Band { offset: b.offset, entry: b.entry.mul(c), from: b.from })
                .collect(),
            sparse: self
                .sparse
                .iter()
                .map(|(r, cidx, e)| (*r, *cidx, e.mul(c)))
                .collect(),
        }
    }

    pub fn add(&self, other: &PatternMatrix) -> Self {
        let mut bands = self.bands.clone();
        bands.extend(other.bands.iter().cloned());
        let mut sparse = self.sparse.clone();
        sparse.extend(other.sparse.iter().cloned());
        PatternMatrix { ring: self.ring, bands, sparse }
    }

    pub fn neg(&self) -> Self {
        PatternMatrix {
            ring: self.ring,
            bands: self
                .bands
                .iter()
                .map(|b| Band { offset: b.offset, entry: b.entry.neg(), from: b.from })
                .collect(),
            sparse: self.sparse.iter().map(|(r, c, e)| (*r, *c, e.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &PatternMatrix) -> Self {
        self.add(&other.neg())
    }

    /// Matrix product; both rules follow from entrywise sums of the band and
    /// sparse contributions.
    pub fn mul(&self, other: &PatternMatrix) -> Self {
        let mut out = PatternMatrix::zero(self.ring);
        // band * band: offsets add; the product band starts where both
        // factors are defined and all indices are nonnegative.
        for b1 in &self.bands {
            for b2 in &other.bands {
                let offset = b1.offset + b2.offset;
                let mut from = b1.from as i64;
                from = from.max(b2.from as i64 - b1.offset);
                from = from.max(-b1.offset);
                from = from.max(-offset);
                from = from.max(0);
                out.bands.push(Band {
                    offset,
                    entry: b1.entry.mul(&b2.entry),
                    from: from as usize,
                });
            }
        }
        // band * sparse: row r of the band hits column r + offset; a sparse
        // entry of `other` at (r + offset? ...) — the middle index must match.
        for b1 in &self.bands {
            for (r2, c2, e2) in &other.sparse {
                let j = *r2 as i64 - b1.offset;
                if j >= b1.from as i64 && j >= 0 {
                    out.sparse.push((j as usize, *c2, b1.entry.mul(e2)));
                }
            }
        }
        // sparse * band
        for (r1, c1, e1) in &self.sparse {
            for b2 in &other.bands {
                if *c1 >= b2.from {
                    let col = *c1 as i64 + b2.offset;
                    if col >= 0 {
                        out.sparse.push((*r1, col as usize, e1.mul(&b2.entry)));
                    }
                }
            }
        }
        // sparse * sparse
        for (r1, c1, e1) in &self.sparse {
            for (r2, c2, e2) in &other.sparse {
                if c1 == r2 {
                    out.sparse.push((*r1, *c2, e1.mul(e2)));
                }
            }
        }
        out
    }

    /// Entry at `(row, col)`.
    pub fn entry_at(&self, row: usize, col: usize) -> AdicScalar {
        let mut acc = AdicScalar::zero(self.ring);
        for b in &self.bands {
            if row >= b.from && col as i64 == row as i64 + b.offset {
                acc = acc.add(&b.entry);
            }
        }
        for (r, c, e) in &self.sparse {
            if *r == row && *c == col {
                acc = acc.add(e);
            }
        }
        acc
    }

    /// Columns possibly touched by `row`.
    pub fn row_support(&self, row: usize) -> Vec<usize> {
        let mut cols: Vec<usize> = Vec::new();
        for b in &self.bands {
            if row >= b.from {
                let c = row as i64 + b.offset;
                if c >= 0 {
                    cols.push(c as usize);
                }
            }
        }
        for (r, c, _) in &self.sparse {
            if *r == row {
                cols.push(*c);
            }
        }
        cols.sort_unstable();
        cols.dedup();
        cols.retain(|&c| !self.entry_at(row, c).is_zero());
        cols
    }

    /// Beyond this row, rows are pure band rows with no sparse interference.
    pub fn stable_row(&self) -> usize {
        let band_from = self.bands.iter().map(|b| b.from).max().unwrap_or(0);
        let neg = self
            .bands
            .iter()
            .map(|b| (-b.offset).max(0) as usize)
            .max()
            .unwrap_or(0);
        let sparse_max = self.sparse.iter().map(|(r, _, _)| r + 1).max().unwrap_or(0);
        band_from.max(sparse_max).max(neg)
    }

    /// Exact canonical form relative to a stabilization row `>= stable_row()`:
    /// beyond it every band is active, so one merged band per offset is
    /// exact; the finite prefix is tabulated entry by entry.
    pub fn canonical_from(&self, stable: usize) -> CanonicalPattern {
        assert!(stable >= self.stable_row());
        let mut bands: BTreeMap<i64, (AdicScalar, usize)> = BTreeMap::new();
        for b in &self.bands {
            bands
                .entry(b.offset)
                .and_modify(|(e, _)| *e = e.add(&b.entry))
                .or_insert_with(|| (b.entry.clone(), stable));
        }
        bands.retain(|_, (e, _)| !e.is_zero());
        let mut sparse: BTreeMap<(usize, usize), AdicScalar> = BTreeMap::new();
        for row in 0..stable {
            for col in self.row_support(row) {
                let v = self.entry_at(row, col);
                if !v.is_zero() {
                    sparse.insert((row, col), v);
                }
            }
        }
        CanonicalPattern { bands, sparse }
    }

    pub fn canonical(&self) -> CanonicalPattern {
        self.canonical_from(self.stable_row())
    }

    pub fn equals(&self, other: &PatternMatrix) -> bool {
        let s = self.stable_row().max(other.stable_row());
        self.canonical_from(s) == other.canonical_from(s)
    }

    pub fn is_zero(&self) -> bool {
        let c = self.canonical();
        c.bands.is_empty() && c.sparse.is_empty()
    }

    /// Entrywise residue in `F_p`, as a pattern matrix with constant entries.
    pub fn residue(&self) -> PatternMatrix {
        PatternMatrix {
            ring: self.ring,
            bands: self
                .bands
                .iter()
                .map(|b| Band {
                    offset: b.offset,
                    entry: AdicScalar::constant(self.ring, b.entry.residue()),
                    from: b.from,
                })
                .collect(),
            sparse: self
                .sparse
                .iter()
                .map(|(r, c, e)| (*r, *c, AdicScalar::constant(self.ring, e.residue())))
                .collect(),
        }
    }

    /// True iff every entry has valuation at least one.
    pub fn all_entries_nonunit(&self) -> bool {
        self.residue().is_zero()
    }
}
