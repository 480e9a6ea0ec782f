//! Deformed currents on a spectrally truncated flat 3-torus and the
//! restricted-algebra cocycle.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;

use crate::disk::random::seeded_rng;
use crate::error::{Error, Result};
use crate::matrix::{MatrixNC, C64, ONE, ZERO};

/// Default limit on the truncated operator size `2·n_g·(2Λ+1)³`.
pub const DEFAULT_SIZE_LIMIT: usize = 20000;

/// Block-sparse square operator: `nblocks × nblocks` grid of `b × b`
/// blocks, absent blocks are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperator {
    nblocks: usize,
    b: usize,
    blocks: BTreeMap<(usize, usize), MatrixNC>,
}

impl BlockOperator {
    pub fn zeros(nblocks: usize, b: usize) -> Self {
        Self { nblocks, b, blocks: BTreeMap::new() }
    }

    pub fn block_diagonal(diag: Vec<MatrixNC>) -> Result<Self> {
        let b = diag.first().map(MatrixNC::dim).unwrap_or(1);
        let mut out = Self::zeros(diag.len(), b);
        for (i, m) in diag.into_iter().enumerate() {
            out.insert(i, i, m)?;
        }
        Ok(out)
    }

    pub fn identity(nblocks: usize, b: usize) -> Self {
        let blocks = (0..nblocks).map(|i| ((i, i), MatrixNC::identity(b))).collect();
        Self { nblocks, b, blocks }
    }

    /// Splits a dense matrix into `b × b` blocks, dropping zero blocks.
    pub fn from_dense(m: &MatrixNC, b: usize) -> Result<Self> {
        if b == 0 || !m.dim().is_multiple_of(b) {
            return Err(Error::DimensionMismatch(format!("size {} is not a multiple of {b}", m.dim())));
        }
        let nblocks = m.dim() / b;
        let mut out = Self::zeros(nblocks, b);
        for i in 0..nblocks {
            for j in 0..nblocks {
                let blk = MatrixNC::from_fn(b, |r, c| m[(i * b + r, j * b + c)]);
                if !blk.is_zero() {
                    out.blocks.insert((i, j), blk);
                }
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> MatrixNC {
        let b = self.b;
        let mut m = MatrixNC::zeros(self.dim());
        for (&(i, j), blk) in &self.blocks {
            for r in 0..b {
                for c in 0..b {
                    m[(i * b + r, j * b + c)] = blk[(r, c)];
                }
            }
        }
        m
    }

    /// Full matrix size.
    pub fn dim(&self) -> usize {
        self.nblocks * self.b
    }

    pub fn block_dim(&self) -> usize {
        self.b
    }

    pub fn num_blocks(&self) -> usize {
        self.nblocks
    }

    pub fn block(&self, i: usize, j: usize) -> Option<&MatrixNC> {
        self.blocks.get(&(i, j))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, usize), &MatrixNC)> {
        self.blocks.iter()
    }

    /// Adds `m` to block `(i, j)`.
    pub fn insert(&mut self, i: usize, j: usize, m: MatrixNC) -> Result<()> {
        if m.dim() != self.b || i >= self.nblocks || j >= self.nblocks {
            return Err(Error::DimensionMismatch(format!("block ({i}, {j}) of size {} in a {}-block grid of {}x{}", m.dim(), self.nblocks, self.b, self.b)));
        }
        match self.blocks.get_mut(&(i, j)) {
            Some(old) => *old = &*old + &m,
            None => {
                self.blocks.insert((i, j), m);
            }
        }
        Ok(())
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.nblocks != other.nblocks || self.b != other.b {
            return Err(Error::DimensionMismatch(format!(
                "operators with {}x{} and {}x{} blocks",
                self.nblocks, self.b, other.nblocks, other.b
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (&(i, j), m) in &other.blocks {
            out.insert(i, j, m.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { nblocks: self.nblocks, b: self.b, blocks: self.blocks.iter().map(|(k, m)| (*k, m.scale(c))).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut rows: HashMap<usize, Vec<(usize, &MatrixNC)>> = HashMap::new();
        for (&(k, j), m) in &other.blocks {
            rows.entry(k).or_default().push((j, m));
        }
        let mut out = Self::zeros(self.nblocks, self.b);
        for (&(i, k), a) in &self.blocks {
            if let Some(row) = rows.get(&k) {
                for &(j, b) in row {
                    out.insert(i, j, a * b)?;
                }
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn adjoint(&self) -> Self {
        Self { nblocks: self.nblocks, b: self.b, blocks: self.blocks.iter().map(|(&(i, j), m)| ((j, i), m.adjoint())).collect() }
    }

    pub fn trace(&self) -> C64 {
        self.blocks.iter().filter(|((i, j), _)| i == j).fold(ZERO, |acc, (_, m)| acc + m.trace())
    }

    /// Hilbert–Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        self.blocks.values().map(|m| m.frobenius_norm().powi(2)).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.values().map(MatrixNC::max_abs).fold(0.0, f64::max)
    }

    /// `B_ij ↦ f(i) B_ij g(j)` for scalar row and column weights.
    pub fn weighted(&self, f: impl Fn(usize) -> f64, g: impl Fn(usize) -> f64) -> Self {
        let blocks = self.blocks.iter().map(|(&(i, j), m)| ((i, j), m.scale(C64::new(f(i) * g(j), 0.0)))).collect();
        Self { nblocks: self.nblocks, b: self.b, blocks }
    }

    /// Keeps only blocks whose row and column indices are both accepted.
    pub fn restricted(&self, keep: impl Fn(usize) -> bool) -> Self {
        let blocks = self.blocks.iter().filter(|((i, j), _)| keep(*i) && keep(*j)).map(|(k, m)| (*k, m.clone())).collect();
        Self { nblocks: self.nblocks, b: self.b, blocks }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let b = self.b;
        let mut out = vec![ZERO; self.dim()];
        for (&(i, j), m) in &self.blocks {
            for r in 0..b {
                let mut acc = ZERO;
                for c in 0..b {
                    acc += m[(r, c)] * v[j * b + c];
                }
                out[i * b + r] += acc;
            }
        }
        out
    }

    /// Largest singular value by power iteration on `A†A`, stopped when the
    /// relative change of the estimate falls below `tol`.
    pub fn op_norm(&self, tol: f64, max_iter: usize) -> f64 {
        if self.blocks.is_empty() {
            return 0.0;
        }
        let adj = self.adjoint();
        let mut rng = seeded_rng(0x5eed);
        let mut v: Vec<C64> = (0..self.dim()).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let mut sigma = 0.0;
        for _ in 0..max_iter {
            let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nv == 0.0 {
                return 0.0;
            }
            v.iter_mut().for_each(|z| *z /= nv);
            let w = adj.apply(&self.apply(&v));
            let lambda = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let next = lambda.sqrt();
            v = w;
            if (next - sigma).abs() <= tol * next {
                return next;
            }
            sigma = next;
        }
        sigma
    }
}

/// Fourier-truncated Dirac operator `D = σ·n ⊗ I_{n_g}` on the modes
/// `|n|_∞ ≤ Λ` of the flat 3-torus, with its sign `ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralTruncation3D {
    lambda: usize,
    n_g: usize,
    modes: Vec<[i32; 3]>,
    d: BlockOperator,
    eps: BlockOperator,
}

/// Sign `ε` assigned to the kernel `n = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroModeSign {
    Plus,
    Minus,
}

pub fn build_truncation(lambda: usize, n_g: usize) -> Result<SpectralTruncation3D> {
    build_truncation_with(lambda, n_g, DEFAULT_SIZE_LIMIT, ZeroModeSign::Plus)
}

pub fn build_truncation_with(lambda: usize, n_g: usize, limit: usize, zero: ZeroModeSign) -> Result<SpectralTruncation3D> {
    if lambda == 0 || n_g == 0 {
        return Err(Error::InvalidArgument("cutoff and gauge dimension must be positive".into()));
    }
    let w = 2 * lambda + 1;
    let size = 2 * n_g * w * w * w;
    if size > limit {
        return Err(Error::CutoffTooLarge { size, limit });
    }
    let l = lambda as i32;
    let mut modes = Vec::with_capacity(w * w * w);
    for a in -l..=l {
        for b in -l..=l {
            for c in -l..=l {
                modes.push([a, b, c]);
            }
        }
    }
    let gauge = MatrixNC::identity(n_g);
    let mut dblocks = Vec::with_capacity(modes.len());
    let mut eblocks = Vec::with_capacity(modes.len());
    for n in &modes {
        let s = sigma_dot([n[0] as f64, n[1] as f64, n[2] as f64]);
        let norm = norm3(n);
        let e = if norm == 0.0 {
            let sign = if zero == ZeroModeSign::Plus { 1.0 } else { -1.0 };
            MatrixNC::identity(2).scale(C64::new(sign, 0.0))
        } else {
            s.scale(C64::new(1.0 / norm, 0.0))
        };
        dblocks.push(s.kron(&gauge));
        eblocks.push(e.kron(&gauge));
    }
    Ok(SpectralTruncation3D { lambda, n_g, modes, d: BlockOperator::block_diagonal(dblocks)?, eps: BlockOperator::block_diagonal(eblocks)? })
}

fn sigma_dot(v: [f64; 3]) -> MatrixNC {
    let [s1, s2, s3] = MatrixNC::pauli();
    &(&s1.scale(C64::new(v[0], 0.0)) + &s2.scale(C64::new(v[1], 0.0))) + &s3.scale(C64::new(v[2], 0.0))
}

fn norm3(n: &[i32; 3]) -> f64 {
    ((n[0] * n[0] + n[1] * n[1] + n[2] * n[2]) as f64).sqrt()
}

impl SpectralTruncation3D {
    pub fn cutoff(&self) -> usize {
        self.lambda
    }

    pub fn gauge_dim(&self) -> usize {
        self.n_g
    }

    /// `2·n_g·(2Λ+1)³`
    pub fn size(&self) -> usize {
        self.d.dim()
    }

    pub fn modes(&self) -> &[[i32; 3]] {
        &self.modes
    }

    /// Block index of mode `n`, if inside the window.
    pub fn index(&self, n: [i32; 3]) -> Option<usize> {
        let l = self.lambda as i32;
        if n.iter().any(|c| c.abs() > l) {
            return None;
        }
        let w = 2 * self.lambda + 1;
        let k = |c: i32| (c + l) as usize;
        Some((k(n[0]) * w + k(n[1])) * w + k(n[2]))
    }

    pub fn dirac(&self) -> &BlockOperator {
        &self.d
    }

    pub fn sign(&self) -> &BlockOperator {
        &self.eps
    }

    /// `|n|²` of block `i`.
    pub fn mode_norm_sqr(&self, i: usize) -> f64 {
        let n = self.modes[i];
        (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]) as f64
    }

    /// Largest entries of `ε² − I`, `ε − ε†`, `D − D†` and `[D, ε]`.
    pub fn invariant_residuals(&self) -> Result<[f64; 4]> {
        let id = BlockOperator::identity(self.modes.len(), 2 * self.n_g);
        Ok([
            self.eps.mul(&self.eps)?.sub(&id)?.max_abs(),
            self.eps.sub(&self.eps.adjoint())?.max_abs(),
            self.d.sub(&self.d.adjoint())?.max_abs(),
            self.d.commutator(&self.eps)?.max_abs(),
        ])
    }

    fn check(&self, x: &BlockOperator) -> Result<()> {
        if x.num_blocks() != self.modes.len() || x.block_dim() != 2 * self.n_g {
            return Err(Error::DimensionMismatch(format!("operator of size {} on a window of size {}", x.dim(), self.size())));
        }
        Ok(())
    }
}

/// A current `X(x) = Σ_q A_q e^{iq·x}` with `n_g × n_g` coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct CurrentOperator {
    n_g: usize,
    modes: Vec<([i32; 3], MatrixNC)>,
}

impl CurrentOperator {
    pub fn new(n_g: usize, modes: Vec<([i32; 3], MatrixNC)>) -> Result<Self> {
        let mut out: Vec<([i32; 3], MatrixNC)> = Vec::new();
        for (q, a) in modes {
            if a.dim() != n_g {
                return Err(Error::DimensionMismatch(format!("coefficient of size {}, expected {n_g}", a.dim())));
            }
            match out.iter_mut().find(|(k, _)| *k == q) {
                Some((_, b)) => *b = &*b + &a,
                None => out.push((q, a)),
            }
        }
        out.sort_by_key(|(q, _)| *q);
        Ok(Self { n_g, modes: out })
    }

    pub fn single(q: [i32; 3], a: MatrixNC) -> Result<Self> {
        Self::new(a.dim(), vec![(q, a)])
    }

    pub fn gauge_dim(&self) -> usize {
        self.n_g
    }

    pub fn modes(&self) -> &[([i32; 3], MatrixNC)] {
        &self.modes
    }

    /// Largest `|q|_∞` among the modes.
    pub fn reach(&self) -> usize {
        self.modes.iter().map(|(q, _)| q.iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0)).max().unwrap_or(0)
    }

    /// Pointwise commutator `[X, Y](x)`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        if self.n_g != other.n_g {
            return Err(Error::DimensionMismatch(format!("currents of gauge size {} and {}", self.n_g, other.n_g)));
        }
        let mut modes = Vec::new();
        for (q, a) in &self.modes {
            for (k, b) in &other.modes {
                modes.push(([q[0] + k[0], q[1] + k[1], q[2] + k[2]], a.commutator(b)));
            }
        }
        Self::new(self.n_g, modes)
    }

    /// Multiplication operator compressed to the window: block
    /// `(n+q, n) = I₂ ⊗ A_q` whenever both modes lie in the window.
    pub fn compress(&self, t: &SpectralTruncation3D) -> Result<BlockOperator> {
        if self.n_g != t.n_g {
            return Err(Error::DimensionMismatch(format!("current of gauge size {} on a window with {}", self.n_g, t.n_g)));
        }
        let mut out = BlockOperator::zeros(t.modes.len(), 2 * self.n_g);
        let id2 = MatrixNC::identity(2);
        for (q, a) in &self.modes {
            let blk = id2.kron(a);
            for (j, n) in t.modes.iter().enumerate() {
                if let Some(i) = t.index([n[0] + q[0], n[1] + q[1], n[2] + q[2]]) {
                    out.insert(i, j, blk.clone())?;
                }
            }
        }
        Ok(out)
    }
}

/// Sign of the second-order correction in the deformed current.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeformationSign {
    /// `X − (D²+1)⁻¹[D,[D,X]]/4`: cancels the order −1 part of `[ε, X]`.
    Cancelling,
    /// `X + (D²+1)⁻¹[D,[D,X]]/4`: doubles it.
    Reinforcing,
}

impl DeformationSign {
    fn factor(self) -> f64 {
        match self {
            DeformationSign::Cancelling => -1.0,
            DeformationSign::Reinforcing => 1.0,
        }
    }
}

/// `X̃ = X − (D² + 1)⁻¹ [D, [D, X]] / 4`, for which `[ε, X̃]` is
/// Hilbert–Schmidt in the limit.
pub fn deform(x: &BlockOperator, t: &SpectralTruncation3D) -> Result<BlockOperator> {
    deform_signed(x, t, DeformationSign::Cancelling)
}

pub fn deform_signed(x: &BlockOperator, t: &SpectralTruncation3D, sign: DeformationSign) -> Result<BlockOperator> {
    t.check(x)?;
    let d = t.dirac();
    let dd = d.commutator(&d.commutator(x)?)?;
    let s = 0.25 * sign.factor();
    let corr = dd.weighted(|i| s / (t.mode_norm_sqr(i) + 1.0), |_| 1.0);
    x.add(&corr)
}

/// The closed form of the deformed single-mode block at `(n+q, n)`:
/// `A_q (1 ∓ (|q|² + [σ·n, σ·q]) / (4(|n+q|² + 1)))`.
pub fn deformed_block(n: [i32; 3], q: [i32; 3], a: &MatrixNC, sign: DeformationSign) -> MatrixNC {
    let f = |v: [i32; 3]| [v[0] as f64, v[1] as f64, v[2] as f64];
    let (sn, sq) = (sigma_dot(f(n)), sigma_dot(f(q)));
    let nq = [n[0] + q[0], n[1] + q[1], n[2] + q[2]];
    let q2 = norm3(&q).powi(2);
    let num = &MatrixNC::identity(2).scale(C64::new(q2, 0.0)) + &sn.commutator(&sq);
    let w = 0.25 * sign.factor() / (norm3(&nq).powi(2) + 1.0);
    let factor = &MatrixNC::identity(2) + &num.scale(C64::new(w, 0.0));
    factor.kron(a)
}

/// `¼ tr ε[ε, X][ε, Y]`
pub fn lundberg_cocycle(x: &BlockOperator, y: &BlockOperator, t: &SpectralTruncation3D) -> Result<C64> {
    t.check(x)?;
    t.check(y)?;
    let e = t.sign();
    let prod = e.mul(&e.commutator(x)?)?.mul(&e.commutator(y)?)?;
    Ok(prod.trace() * 0.25)
}

/// `¼ tr ε[ε, X][ε, Y]` for dense matrices and a diagonal sign.
pub fn lundberg_cocycle_dense(eps: &[f64], x: &MatrixNC, y: &MatrixNC) -> Result<C64> {
    let n = eps.len();
    if x.dim() != n || y.dim() != n {
        return Err(Error::DimensionMismatch(format!("matrices of size {} and {} with a sign of size {n}", x.dim(), y.dim())));
    }
    let e = MatrixNC::diag(&eps.iter().map(|s| C64::new(*s, 0.0)).collect::<Vec<_>>());
    Ok((&(&e * &e.commutator(x)) * &e.commutator(y)).trace() * 0.25)
}

/// One-dimensional model: `D = diag(n)`, `|n| ≤ Λ`, `ε(0) = +1`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneDimModel {
    lambda: usize,
}

impl OneDimModel {
    pub fn new(lambda: usize) -> Self {
        Self { lambda }
    }

    pub fn size(&self) -> usize {
        2 * self.lambda + 1
    }

    /// Sign of `D` on each mode, `n = −Λ, …, Λ`.
    pub fn sign(&self) -> Vec<f64> {
        let l = self.lambda as i64;
        (-l..=l).map(|n| if n < 0 { -1.0 } else { 1.0 }).collect()
    }

    /// Compressed shift `e_n ↦ e_{n+m}`.
    pub fn shift(&self, m: i64) -> MatrixNC {
        let s = self.size() as i64;
        MatrixNC::from_fn(self.size(), |i, j| if i as i64 == j as i64 + m && (0..s).contains(&(j as i64 + m)) { ONE } else { ZERO })
    }

    pub fn cocycle(&self, x: &MatrixNC, y: &MatrixNC) -> Result<C64> {
        lundberg_cocycle_dense(&self.sign(), x, y)
    }
}

/// Norms of the commutator defect `Z = [X̃, Ỹ] − ([X, Y])~` on the part of
/// the window not affected by the compression.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DefectDiagnostics {
    pub cutoff: usize,
    /// `‖(I + D²) Z‖_op`
    pub weighted_defect: f64,
    /// `‖(I + D²) [X̃, Ỹ]‖_op`
    pub weighted_commutator: f64,
    /// `‖Z‖_HS`
    pub defect_hs: f64,
}

pub const OP_NORM_TOL: f64 = 1e-8;
const OP_NORM_MAX_ITER: usize = 5000;

/// `Z = [X̃, Ỹ] − ([X, Y])~`, restricted to modes at `∞`-distance at least
/// `reach(X) + reach(Y)` from the window edge, with its diagnostics.
pub fn commutator_defect(x: &CurrentOperator, y: &CurrentOperator, t: &SpectralTruncation3D) -> Result<(BlockOperator, DefectDiagnostics)> {
    let xt = deform(&x.compress(t)?, t)?;
    let yt = deform(&y.compress(t)?, t)?;
    let com = xt.commutator(&yt)?;
    let z = com.sub(&deform(&x.bracket(y)?.compress(t)?, t)?)?;
    let margin = (x.reach() + y.reach()) as i32;
    let inner = t.lambda as i32 - margin;
    let keep = |i: usize| t.modes[i].iter().all(|c| c.abs() <= inner);
    let z = z.restricted(keep);
    let com = com.restricted(keep);
    let w = |i: usize| 1.0 + t.mode_norm_sqr(i);
    let diag = DefectDiagnostics {
        cutoff: t.lambda,
        weighted_defect: z.weighted(w, |_| 1.0).op_norm(OP_NORM_TOL, OP_NORM_MAX_ITER),
        weighted_commutator: com.weighted(w, |_| 1.0).op_norm(OP_NORM_TOL, OP_NORM_MAX_ITER),
        defect_hs: z.hs_norm(),
    };
    Ok((z, diag))
}

/// One row of the Hilbert–Schmidt comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HsRow {
    pub cutoff: usize,
    /// `‖[ε, X]‖_HS`
    pub plain: f64,
    /// `‖[ε, X̃]‖_HS`
    pub deformed: f64,
}

pub fn hs_norm_comparison(x: &CurrentOperator, cutoffs: &[usize]) -> Result<Vec<HsRow>> {
    hs_norm_comparison_signed(x, cutoffs, DeformationSign::Cancelling)
}

pub fn hs_norm_comparison_signed(x: &CurrentOperator, cutoffs: &[usize], sign: DeformationSign) -> Result<Vec<HsRow>> {
    if cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("cutoffs must be strictly ascending".into()));
    }
    cutoffs
        .iter()
        .map(|&l| {
            let t = build_truncation(l, x.gauge_dim())?;
            let xc = x.compress(&t)?;
            let xt = deform_signed(&xc, &t, sign)?;
            Ok(HsRow { cutoff: l, plain: t.sign().commutator(&xc)?.hs_norm(), deformed: t.sign().commutator(&xt)?.hs_norm() })
        })
        .collect()
}

/// `(‖[ε,X]‖²_HS increment) / (‖[ε,X̃]‖²_HS increment)` between consecutive rows.
pub fn hs_trend_gaps(rows: &[HsRow]) -> Vec<f64> {
    rows.windows(2)
        .map(|w| (w[1].plain.powi(2) - w[0].plain.powi(2)) / (w[1].deformed.powi(2) - w[0].deformed.powi(2)))
        .collect()
}
