//! The Pontryagin duality matrix calculus: zero-convergent formal families,
//! contraaction evaluation with exact closed-form tails, and the
//! identification of contramodule and product-module morphism spaces with
//! row-zero-convergent matrices.

use crate::endo::PatternMatrix;
use crate::error::{Error, Result};
use crate::scalar::{AdicScalar, Backend, RingDescriptor, INFINITE_VALUATION};

// ---------------------------------------------------------------------------
// formal families

/// A zero-convergent family of scalars indexed by a finite set or by `ω`.
/// The infinite case is eventually geometric: `coeff_k = scale·t^(step·k)`
/// for `k >= prefix.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormalFamily {
    Finite(Vec<AdicScalar>),
    Geometric { prefix: Vec<AdicScalar>, scale: AdicScalar, step: usize },
}

impl FormalFamily {
    pub fn ring(&self) -> RingDescriptor {
        match self {
            FormalFamily::Finite(v) => *v.first().expect("empty family").ring(),
            FormalFamily::Geometric { scale, .. } => *scale.ring(),
        }
    }

    /// Point mass at one index.
    pub fn point(ring: RingDescriptor, len: usize, at: usize) -> Self {
        let mut v = vec![AdicScalar::zero(ring); len];
        v[at] = AdicScalar::one(ring);
        FormalFamily::Finite(v)
    }

    pub fn coeff_at(&self, k: usize) -> AdicScalar {
        match self {
            FormalFamily::Finite(v) => {
                v.get(k).cloned().unwrap_or_else(|| AdicScalar::zero(self.ring()))
            }
            FormalFamily::Geometric { prefix, scale, step } => {
                if k < prefix.len() {
                    prefix[k].clone()
                } else {
                    scale.mul(&AdicScalar::monomial(*scale.ring(), 1, step * k))
                }
            }
        }
    }

    /// Exact zero-convergence: for every valuation bound only finitely many
    /// coefficients fall below it.
    pub fn is_zero_convergent(&self) -> bool {
        match self {
            FormalFamily::Finite(_) => true,
            FormalFamily::Geometric { scale, step, .. } => {
                if scale.is_zero() {
                    return true;
                }
                match scale.ring().backend {
                    // t^N = 0: the tail dies entirely once step·k ≥ N
                    Backend::Truncated => {
                        *step >= 1 || scale.valuation() == INFINITE_VALUATION
                    }
                    Backend::Pattern => *step >= 1,
                }
            }
        }
    }
}

/// Values a formal family is evaluated against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueFamily {
    Finite(Vec<AdicScalar>),
    /// The same value at every index.
    Repeat(AdicScalar),
}

impl ValueFamily {
    fn value_at(&self, k: usize, ring: RingDescriptor) -> AdicScalar {
        match self {
            ValueFamily::Finite(v) => {
                v.get(k).cloned().unwrap_or_else(|| AdicScalar::zero(ring))
            }
            ValueFamily::Repeat(v) => v.clone(),
        }
    }
}

/// The contraaction `Σ_x coeff_x · value_x` as an exact limit of partial
/// sums. Truncated tails vanish past valuation `N`; pattern geometric tails
/// are summed in closed form as rational functions.
///
/// ```
/// use endoring::duality::{eval_contraaction, FormalFamily, ValueFamily};
/// use endoring::scalar::{AdicScalar, RingDescriptor};
///
/// let ring = RingDescriptor::pattern(2);
/// // coefficients (t^k)_{k∈ω} against the constant value 1
/// let coeffs = FormalFamily::Geometric {
///     prefix: Vec::new(),
///     scale: AdicScalar::one(ring),
///     step: 1,
/// };
/// let sum = eval_contraaction(&coeffs, &ValueFamily::Repeat(AdicScalar::one(ring))).unwrap();
/// let geometric = AdicScalar::one(ring)
///     .sub(&AdicScalar::monomial(ring, 1, 1))
///     .invert()
///     .unwrap();
/// assert_eq!(sum, geometric); // 1/(1 − t)
/// ```
pub fn eval_contraaction(coeffs: &FormalFamily, values: &ValueFamily) -> Result<AdicScalar> {
    let ring = coeffs.ring();
    if !coeffs.is_zero_convergent() {
        return Err(Error::NotSummable);
    }
    match coeffs {
        FormalFamily::Finite(v) => {
            let mut acc = AdicScalar::zero(ring);
            for (k, c) in v.iter().enumerate() {
                acc = acc.add(&c.mul(&values.value_at(k, ring)));
            }
            Ok(acc)
        }
        FormalFamily::Geometric { prefix, scale, step } => {
            let mut acc = AdicScalar::zero(ring);
            for (k, c) in prefix.iter().enumerate() {
                acc = acc.add(&c.mul(&values.value_at(k, ring)));
            }
            let from = prefix.len();
            if scale.is_zero() {
                return Ok(acc);
            }
            match (ring.backend, values) {
                (Backend::Truncated, _) => {
                    // only finitely many tail terms survive mod t^N
                    let mut k = from;
                    while step * k < ring.precision {
                        let c = scale.mul(&AdicScalar::monomial(ring, 1, step * k));
                        acc = acc.add(&c.mul(&values.value_at(k, ring)));
                        k += 1;
                        if *step == 0 {
                            return Err(Error::NotSummable);
                        }
                    }
                    Ok(acc)
                }
                (Backend::Pattern, ValueFamily::Repeat(v)) => {
                    // Σ_{k≥from} scale·t^(step·k)·v
                    //   = scale·v·t^(step·from) / (1 − t^step)
                    let numer = scale
                        .mul(v)
                        .mul(&AdicScalar::monomial(ring, 1, step * from));
                    let denom =
                        AdicScalar::one(ring).sub(&AdicScalar::monomial(ring, 1, *step));
                    let tail = numer.mul(&denom.invert().map_err(|_| Error::NotSummable)?);
                    Ok(acc.add(&tail))
                }
                (Backend::Pattern, ValueFamily::Finite(vals)) => {
                    // the values vanish past their finite support
                    for (k, val) in vals.iter().enumerate().skip(from) {
                        let c = scale.mul(&AdicScalar::monomial(ring, 1, step * k));
                        acc = acc.add(&c.mul(val));
                    }
                    Ok(acc)
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// duality matrices

/// Which morphism space the matrix currently denotes. The same
/// row-zero-convergent matrix is a map of free contramodules
/// `𝔯[[Y]] → 𝔯[[X]]` and a continuous map of topological products
/// `𝔯^X → 𝔯^Y`; dualizing just flips the reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualityDirection {
    ContraToProd,
    ProdToContra,
}

impl DualityDirection {
    pub fn flip(self) -> Self {
        match self {
            DualityDirection::ContraToProd => DualityDirection::ProdToContra,
            DualityDirection::ProdToContra => DualityDirection::ContraToProd,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixBody {
    /// Finite `Y × X`.
    Finite(Vec<Vec<AdicScalar>>),
    /// Finitely many rows over `ω` columns.
    Rows(Vec<FormalFamily>),
    /// `ω × ω`, banded.
    Band(PatternMatrix),
}

/// Rows indexed by the contramodule generator set `Y`, columns by `X`; a
/// row vector `s` maps to `s·A`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualityMatrix {
    pub ring: RingDescriptor,
    pub direction: DualityDirection,
    pub body: MatrixBody,
}

impl DualityMatrix {
    pub fn finite(
        ring: RingDescriptor,
        direction: DualityDirection,
        entries: Vec<Vec<AdicScalar>>,
    ) -> Self {
        DualityMatrix { ring, direction, body: MatrixBody::Finite(entries) }
    }

    pub fn identity(ring: RingDescriptor, direction: DualityDirection, n: usize) -> Self {
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j { AdicScalar::one(ring) } else { AdicScalar::zero(ring) }
                    })
                    .collect()
            })
            .collect();
        DualityMatrix::finite(ring, direction, entries)
    }
}

/// Every row must be a zero-convergent formal family over `X`. Band rows
/// have finite support, hence always pass; geometric rows need increasing
/// valuations.
pub fn check_row_zero_convergent(matrix: &DualityMatrix) -> bool {
    match &matrix.body {
        MatrixBody::Finite(_) => true,
        MatrixBody::Rows(rows) => rows.iter().all(|r| r.is_zero_convergent()),
        MatrixBody::Band(_) => true,
    }
}

/// Reinterpret the matrix on the other side of the duality. An involution;
/// composition order reverses (see [`compose_duality`]).
pub fn dual_matrix(matrix: &DualityMatrix) -> Result<DualityMatrix> {
    if !check_row_zero_convergent(matrix) {
        return Err(Error::NotRowConvergent);
    }
    Ok(DualityMatrix {
        ring: matrix.ring,
        direction: matrix.direction.flip(),
        body: matrix.body.clone(),
    })
}

fn finite_mul(
    ring: RingDescriptor,
    a: &[Vec<AdicScalar>],
    b: &[Vec<AdicScalar>],
) -> Result<Vec<Vec<AdicScalar>>> {
    let inner = b.len();
    if a.iter().any(|row| row.len() != inner) {
        return Err(Error::Invalid("matrix dimension mismatch".into()));
    }
    let cols = b.first().map_or(0, |r| r.len());
    Ok(a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = AdicScalar::zero(ring);
                    for (k, x) in row.iter().enumerate() {
                        acc = acc.add(&x.mul(&b[k][j]));
                    }
                    acc
                })
                .collect()
        })
        .collect())
}

/// Composition of two morphisms on the same side: "first `a`, then `b`".
/// On the contramodule side (`a: 𝔯[[Y]] → 𝔯[[X]]`, `b: 𝔯[[X]] → 𝔯[[W]]`)
/// this is the product `a·b`; on the product side the same composite is
/// `b·a`, which is what makes [`dual_matrix`] contravariant.
pub fn compose_duality(a: &DualityMatrix, b: &DualityMatrix) -> Result<DualityMatrix> {
    if a.direction != b.direction {
        return Err(Error::Invalid("composing matrices on different sides".into()));
    }
    let body = match (&a.body, &b.body, a.direction) {
        (MatrixBody::Finite(ma), MatrixBody::Finite(mb), DualityDirection::ContraToProd) => {
            MatrixBody::Finite(finite_mul(a.ring, ma, mb)?)
        }
        (MatrixBody::Finite(ma), MatrixBody::Finite(mb), DualityDirection::ProdToContra) => {
            MatrixBody::Finite(finite_mul(a.ring, mb, ma)?)
        }
        (MatrixBody::Band(ma), MatrixBody::Band(mb), DualityDirection::ContraToProd) => {
            MatrixBody::Band(ma.mul(mb))
        }
        (MatrixBody::Band(ma), MatrixBody::Band(mb), DualityDirection::ProdToContra) => {
            MatrixBody::Band(mb.mul(ma))
        }
        _ => return Err(Error::Invalid("unsupported matrix body combination".into())),
    };
    Ok(DualityMatrix { ring: a.ring, direction: a.direction, body })
}

/// A `Y`-indexed output column: finite, or with an eventually constant
/// value along `ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AppliedColumn {
    Finite(Vec<AdicScalar>),
    Eventually { prefix: Vec<AdicScalar>, value: AdicScalar },
}

impl AppliedColumn {
    pub fn value_at(&self, k: usize) -> AdicScalar {
        match self {
            AppliedColumn::Finite(v) => v[k].clone(),
            AppliedColumn::Eventually { prefix, value } => {
                prefix.get(k).cloned().unwrap_or_else(|| value.clone())
            }
        }
    }
}

/// Apply the matrix as a continuous product-module map: output
/// `y ↦ Σ_x entry(y, x)·vector(x)`.
pub fn apply_product_map(
    matrix: &DualityMatrix,
    vector: &ValueFamily,
) -> Result<AppliedColumn> {
    let ring = matrix.ring;
    match &matrix.body {
        MatrixBody::Finite(rows) => {
            let out = rows
                .iter()
                .map(|row| {
                    let mut acc = AdicScalar::zero(ring);
                    for (x, entry) in row.iter().enumerate() {
                        acc = acc.add(&entry.mul(&vector.value_at(x, ring)));
                    }
                    acc
                })
                .collect();
            Ok(AppliedColumn::Finite(out))
        }
        MatrixBody::Rows(rows) => {
            let out = rows
                .iter()
                .map(|row| eval_contraaction(row, vector))
                .collect::<Result<Vec<_>>>()?;
            Ok(AppliedColumn::Finite(out))
        }
        MatrixBody::Band(m) => {
            let stable = m.stable_row();
            // beyond the stabilization row, every row sees the same band
            // entries; against a repeating vector the output is constant
            let mut prefix = Vec::with_capacity(stable);
            for y in 0..stable {
                let mut acc = AdicScalar::zero(ring);
                for x in m.row_support(y) {
                    acc = acc.add(&m.entry_at(y, x).mul(&vector.value_at(x, ring)));
                }
                prefix.push(acc);
            }
            match vector {
                ValueFamily::Repeat(v) => {
                    let mut value = AdicScalar::zero(ring);
                    for x in m.row_support(stable) {
                        value = value.add(&m.entry_at(stable, x).mul(v));
                    }
                    Ok(AppliedColumn::Eventually { prefix, value })
                }
                ValueFamily::Finite(vals) => {
                    // rows past the vector's support plus the band spread
                    // are zero
                    let reach = stable + vals.len() + 1;
                    let mut out = prefix;
                    for y in out.len()..reach {
                        let mut acc = AdicScalar::zero(ring);
                        for x in m.row_support(y) {
                            acc = acc.add(&m.entry_at(y, x).mul(&vector.value_at(x, ring)));
                        }
                        out.push(acc);
                    }
                    Ok(AppliedColumn::Eventually {
                        prefix: out,
                        value: AdicScalar::zero(ring),
                    })
                }
            }
        }
    }
}
