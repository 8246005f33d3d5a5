//! Tensor-product structures: Kronecker sums, factorized evolution and an
//! operational check of the independence and completeness criteria for
//! observable-induced factorizations.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_norm_c, non_hermiticity, CMat};

/// Largest total dimension accepted by [`zanardi_check`].
pub const MAX_TPS_DIM: usize = 64;

/// Cross-set commutators at or below this max-norm count as commuting.
pub const INDEPENDENCE_TOL: f64 = 1e-10;

/// Residual below which a new algebra element counts as linearly dependent.
pub const CLOSURE_TOL: f64 = 1e-9;

/// Hermiticity tolerance for evolution generators, relative to their scale.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Generators of one candidate subsystem algebra.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    label: String,
    dim: usize,
    generators: Vec<CMat>,
    hermitian: Vec<bool>,
}

impl OperatorSet {
    pub fn new(label: impl Into<String>, dim: usize, generators: Vec<CMat>) -> Result<Self> {
        let label = label.into();
        for (k, g) in generators.iter().enumerate() {
            if g.nrows() != dim || g.ncols() != dim {
                return Err(Error::InvalidArgument(format!(
                    "generator {k} of set '{label}' is {}x{}, expected {dim}x{dim}",
                    g.nrows(),
                    g.ncols()
                )));
            }
        }
        let hermitian = generators
            .iter()
            .map(|g| non_hermiticity(g) <= HERMITIAN_TOL * max_norm_c(g).max(1.0))
            .collect();
        Ok(Self {
            label,
            dim,
            generators,
            hermitian,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[CMat] {
        &self.generators
    }

    /// Per-generator Hermiticity flags.
    pub fn hermitian(&self) -> &[bool] {
        &self.hermitian
    }

    /// `U G U†` for every generator.
    pub fn conjugated(&self, u: &CMat) -> Result<Self> {
        let ud = u.adjoint();
        Self::new(
            self.label.clone(),
            self.dim,
            self.generators.iter().map(|g| u * g * &ud).collect(),
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Independence {
    pub pass: bool,
    /// Largest `‖[A, B]‖_max` over generators of different sets.
    pub worst_commutator: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Completeness {
    pub pass: bool,
    /// Dimension of the algebra generated by all sets together.
    pub generated_dim: usize,
    /// `dim²`, the dimension of the full matrix algebra.
    pub full_dim: usize,
    /// Product-augmentation rounds until the span stopped growing.
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TpsReport {
    pub dim: usize,
    pub independence: Independence,
    pub completeness: Completeness,
    /// Dimension of the algebra generated by each set alone.
    pub set_algebra_dims: Vec<usize>,
    /// Subsystem dimensions, reported only when both criteria pass and
    /// every set algebra is a full matrix algebra whose sizes multiply to
    /// `dim`.
    pub factor_dims: Option<Vec<usize>>,
    /// The accessibility criterion is never computed.
    pub accessibility: &'static str,
}

impl TpsReport {
    pub fn passes(&self) -> bool {
        self.independence.pass && self.completeness.pass
    }
}

fn check_square(m: &CMat, what: &str) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{what} is {}x{}, not square",
            m.nrows(),
            m.ncols()
        )))
    }
}

/// `A ⊗ I + I ⊗ B`.
pub fn kron_sum(a: &CMat, b: &CMat) -> Result<CMat> {
    check_square(a, "left operand")?;
    check_square(b, "right operand")?;
    let ia = CMat::identity(a.nrows(), a.nrows());
    let ib = CMat::identity(b.nrows(), b.nrows());
    Ok(a.kronecker(&ib) + ia.kronecker(b))
}

/// Left-associated Kronecker sum of any number of factors.
pub fn kron_sum_all(factors: &[CMat]) -> Result<CMat> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("no factors given".into()))?;
    check_square(first, "factor 0")?;
    rest.iter().try_fold(first.clone(), |acc, f| kron_sum(&acc, f))
}

/// `exp(-i H t)` of a Hermitian matrix via its eigendecomposition.
pub fn unitary_evolution(h: &CMat, t: f64) -> Result<CMat> {
    check_square(h, "Hamiltonian")?;
    let skew = non_hermiticity(h);
    if skew > HERMITIAN_TOL * max_norm_c(h).max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "Hamiltonian is not Hermitian (max |H - H†| = {skew:.3e})"
        )));
    }
    let eig = SymmetricEigen::new(h.clone());
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -l * t)),
    );
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&phases) * v.adjoint())
}

/// `⊗_i exp(-i H_i t)`, the evolution generated by the Kronecker sum of
/// the `H_i`.
pub fn factorized_evolution(hamiltonians: &[CMat], t: f64) -> Result<CMat> {
    let (first, rest) = hamiltonians
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("no Hamiltonians given".into()))?;
    rest.iter().try_fold(unitary_evolution(first, t)?, |acc, h| {
        Ok(acc.kronecker(&unitary_evolution(h, t)?))
    })
}

/// Orthonormal (Frobenius) basis of a matrix span, grown one candidate at
/// a time.
struct Span {
    dim: usize,
    basis: Vec<DVector<Complex64>>,
}

impl Span {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            basis: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.basis.len()
    }

    /// Adds the component of `m` orthogonal to the span, if significant.
    /// Matrices whose norm is negligible against `reference` count as zero.
    fn insert(&mut self, m: &CMat, reference: f64) -> bool {
        if self.basis.len() == self.dim * self.dim {
            return false;
        }
        let scale = m.norm();
        if scale == 0.0 || scale <= CLOSURE_TOL * reference {
            return false;
        }
        let mut v = DVector::from_column_slice(m.as_slice()) / Complex64::new(scale, 0.0);
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for b in &self.basis {
                let c = b.dotc(&v);
                v -= b * c;
            }
        }
        let residual = v.norm();
        if residual <= CLOSURE_TOL {
            return false;
        }
        self.basis.push(v / Complex64::new(residual, 0.0));
        true
    }

    fn matrix(&self, k: usize) -> CMat {
        CMat::from_column_slice(self.dim, self.dim, self.basis[k].as_slice())
    }
}

/// Dimension of the unital algebra generated by `generators`, with the
/// number of augmentation rounds needed to reach the fixpoint.
pub fn algebra_dimension(generators: &[CMat], dim: usize) -> Result<(usize, usize)> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    if dim > MAX_TPS_DIM {
        return Err(Error::UnsupportedSize {
            what: "operator space dimension",
            value: dim,
            max: MAX_TPS_DIM,
        });
    }
    let mut span = Span::new(dim);
    span.insert(&CMat::identity(dim, dim), 0.0);
    for g in generators {
        if g.nrows() != dim || g.ncols() != dim {
            return Err(Error::InvalidArgument(format!(
                "generator is {}x{}, expected {dim}x{dim}",
                g.nrows(),
                g.ncols()
            )));
        }
        span.insert(g, 0.0);
    }
    // Words in the generators: close the span under left multiplication.
    // Span matrices have unit Frobenius norm, so `‖g‖` bounds each product.
    let norms: Vec<f64> = generators.iter().map(|g| g.norm()).collect();
    let mut frontier = 0;
    let mut rounds = 0;
    while frontier < span.len() {
        rounds += 1;
        let end = span.len();
        for k in frontier..end {
            let x = span.matrix(k);
            for (g, norm) in generators.iter().zip(&norms) {
                span.insert(&(g * &x), *norm);
            }
        }
        frontier = end;
    }
    Ok((span.len(), rounds))
}

fn commutator_norm(a: &CMat, b: &CMat) -> f64 {
    max_norm_c(&(a * b - b * a))
}

/// Independence and completeness of the candidate subsystem algebras.
/// Accessibility is a physical condition outside the model and is stamped
/// `"caller-asserted"`.
pub fn zanardi_check(sets: &[OperatorSet], dim: usize) -> Result<TpsReport> {
    if sets.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 operator sets, got {}",
            sets.len()
        )));
    }
    if dim > MAX_TPS_DIM {
        return Err(Error::UnsupportedSize {
            what: "operator space dimension",
            value: dim,
            max: MAX_TPS_DIM,
        });
    }
    if let Some(s) = sets.iter().find(|s| s.dim != dim) {
        return Err(Error::Mismatch(format!(
            "set '{}' acts on dimension {}, expected {dim}",
            s.label, s.dim
        )));
    }

    let mut worst: f64 = 0.0;
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            for x in &a.generators {
                for y in &b.generators {
                    worst = worst.max(commutator_norm(x, y));
                }
            }
        }
    }
    let independence = Independence {
        pass: worst <= INDEPENDENCE_TOL,
        worst_commutator: worst,
    };

    let all: Vec<CMat> = sets.iter().flat_map(|s| s.generators.iter().cloned()).collect();
    let (generated_dim, iterations) = algebra_dimension(&all, dim)?;
    let completeness = Completeness {
        pass: generated_dim == dim * dim,
        generated_dim,
        full_dim: dim * dim,
        iterations,
    };

    let set_algebra_dims = sets
        .iter()
        .map(|s| algebra_dimension(&s.generators, dim).map(|(d, _)| d))
        .collect::<Result<Vec<_>>>()?;
    let factor_dims = if independence.pass && completeness.pass {
        let roots: Option<Vec<usize>> = set_algebra_dims
            .iter()
            .map(|&d| {
                let r = (d as f64).sqrt().round() as usize;
                (r * r == d).then_some(r)
            })
            .collect();
        roots.filter(|r| r.iter().product::<usize>() == dim)
    } else {
        None
    };

    Ok(TpsReport {
        dim,
        independence,
        completeness,
        set_algebra_dims,
        factor_dims,
        accessibility: "caller-asserted",
    })
}

/// Matrix units `E_ij ⊗ I` (or `I ⊗ E_ij`, ...) acting on factor `which`
/// of a product of spaces with the given dimensions.
pub fn factor_algebra(dims: &[usize], which: usize) -> Result<Vec<CMat>> {
    if which >= dims.len() {
        return Err(Error::InvalidArgument(format!(
            "factor {which} out of range for {} factors",
            dims.len()
        )));
    }
    let d = dims[which];
    let before: usize = dims[..which].iter().product();
    let after: usize = dims[which + 1..].iter().product();
    let left = CMat::identity(before, before);
    let right = CMat::identity(after, after);
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut e = CMat::zeros(d, d);
            e[(i, j)] = Complex64::new(1.0, 0.0);
            out.push(left.kronecker(&e).kronecker(&right));
        }
    }
    Ok(out)
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Seeded random Hermitian matrix `(G + G†)/2` with complex Gaussian `G`.
pub fn random_hermitian(dim: usize, seed: u64) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMat::from_fn(dim, dim, |_, _| complex_gaussian(&mut rng));
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Seeded Haar-random unitary from the QR factorization of a complex
/// Gaussian matrix, with the phases of `R`'s diagonal absorbed.
pub fn random_unitary(dim: usize, seed: u64) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMat::from_fn(dim, dim, |_, _| complex_gaussian(&mut rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSet {
    label: String,
    generators: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    dim: usize,
    sets: Vec<RawSet>,
}

/// Parses `{"dim": d, "sets": [{"label": ..., "generators": [...]}]}` where
/// every generator is a row-major nested array of `[re, im]` pairs.
pub fn parse_operator_sets(json: &str) -> Result<(usize, Vec<OperatorSet>)> {
    let raw: RawInput =
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("operator sets: {e}")))?;
    let sets = raw
        .sets
        .into_iter()
        .map(|s| {
            let gens = s
                .generators
                .iter()
                .enumerate()
                .map(|(k, rows)| {
                    if rows.len() != raw.dim || rows.iter().any(|r| r.len() != raw.dim) {
                        return Err(Error::Parse(format!(
                            "generator {k} of set '{}' is not {}x{}",
                            s.label, raw.dim, raw.dim
                        )));
                    }
                    Ok(CMat::from_fn(raw.dim, raw.dim, |i, j| {
                        Complex64::new(rows[i][j][0], rows[i][j][1])
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            OperatorSet::new(s.label, raw.dim, gens)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((raw.dim, sets))
}

/// Inverse of [`parse_operator_sets`].
pub fn operator_sets_to_json(dim: usize, sets: &[OperatorSet]) -> String {
    let sets: Vec<serde_json::Value> = sets
        .iter()
        .map(|s| {
            let gens: Vec<Vec<Vec<[f64; 2]>>> = s
                .generators
                .iter()
                .map(|g| {
                    (0..g.nrows())
                        .map(|i| (0..g.ncols()).map(|j| [g[(i, j)].re, g[(i, j)].im]).collect())
                        .collect()
                })
                .collect();
            serde_json::json!({ "label": s.label, "generators": gens })
        })
        .collect();
    serde_json::json!({ "dim": dim, "sets": sets }).to_string()
}
