//! Directed Cayley graphs `G_S` on the plane `H = R x R`: an edge runs from
//! `x` to `y` exactly when `y - x` lies in the generator set `S`.
//!
//! The eigenvalue attached to the character `chi_xi` is
//! `lambda_xi = sum_{s in S} chi_xi(s)`. [`spectrum`] computes all of them
//! either by that sum directly or by a multidimensional FFT of the
//! indicator of `S`. Adjacency is only materialized by the oracles.

use std::collections::HashSet;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::algebra::{Elem, Point, RingCtx, RingKind, UnitRoots};
use crate::bipoly::{level_set, BiPoly};
use crate::error::{ensure_cap, Error, Result};
use crate::par;

/// Cap on the number of vertices `n = order^2`.
pub const MAX_VERTICES: u64 = 1 << 24;
/// Cap on `n` for oracles that touch every vertex pair or build adjacency.
pub const MAX_ORACLE_VERTICES: u64 = 10_000;
/// Relative tolerance on the trace and Frobenius-norm identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-8;

/// A digraph given by out- and in-neighbour lists on vertices `0..n`.
pub trait Digraph {
    fn vertex_count(&self) -> usize;
    fn out_neighbors(&self, v: usize) -> Vec<usize>;
    fn in_neighbors(&self, v: usize) -> Vec<usize>;
}

#[derive(Clone, Debug)]
pub struct CayleyDigraph {
    ctx: RingCtx,
    gens: Vec<Point>,
    member: Vec<bool>,
}

impl CayleyDigraph {
    pub fn build<I>(ctx: &RingCtx, gens: I) -> Result<Self>
    where
        I: IntoIterator<Item = Point>,
    {
        let q = ctx.order() as u64;
        ensure_cap("vertex set", q * q, MAX_VERTICES)?;
        let mut member = vec![false; (q * q) as usize];
        let mut list = Vec::new();
        for s in gens {
            ctx.elem(s.0.0)?;
            ctx.elem(s.1.0)?;
            let idx = (s.0.0 as u64 * q + s.1.0 as u64) as usize;
            if !member[idx] {
                member[idx] = true;
                list.push(s);
            }
        }
        list.sort_unstable();
        Ok(CayleyDigraph { ctx: ctx.clone(), gens: list, member })
    }

    /// `G_a`: generators are the zeros of `P - a`.
    pub fn from_level(p: &BiPoly, a: Elem) -> Result<Self> {
        let table = p.value_table()?;
        Self::from_value_table(p.ctx(), &table, a)
    }

    /// `G_a` from a precomputed table of `P` (see [`BiPoly::value_table`]).
    pub fn from_value_table(ctx: &RingCtx, table: &[Elem], a: Elem) -> Result<Self> {
        Self::build(ctx, level_set(table, ctx.order(), a))
    }

    pub fn ctx(&self) -> &RingCtx {
        &self.ctx
    }

    pub fn generators(&self) -> &[Point] {
        &self.gens
    }

    /// Out-degree `|S|`.
    pub fn degree(&self) -> usize {
        self.gens.len()
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.member.len()
    }

    pub fn side(&self) -> u32 {
        self.ctx.order()
    }

    #[inline]
    pub fn index(&self, x: Point) -> usize {
        x.0.0 as usize * self.side() as usize + x.1.0 as usize
    }

    #[inline]
    pub fn point(&self, idx: usize) -> Point {
        let q = self.side() as usize;
        (Elem((idx / q) as u32), Elem((idx % q) as u32))
    }

    pub fn is_generator(&self, s: Point) -> bool {
        self.member[self.index(s)]
    }

    pub fn neighbors_out(&self, x: Point) -> Vec<Point> {
        let ctx = &self.ctx;
        self.gens.iter().map(|s| (ctx.add(x.0, s.0), ctx.add(x.1, s.1))).collect()
    }

    pub fn neighbors_in(&self, x: Point) -> Vec<Point> {
        let ctx = &self.ctx;
        self.gens.iter().map(|s| (ctx.sub(x.0, s.0), ctx.sub(x.1, s.1))).collect()
    }

    /// Characters are `exp(2 pi i k / N)` with `N` the characteristic (fields)
    /// or modulus (Z_m).
    fn character_order(&self) -> u32 {
        self.ctx.characteristic()
    }
}

impl Digraph for CayleyDigraph {
    fn vertex_count(&self) -> usize {
        self.n()
    }

    fn out_neighbors(&self, v: usize) -> Vec<usize> {
        self.neighbors_out(self.point(v)).into_iter().map(|x| self.index(x)).collect()
    }

    fn in_neighbors(&self, v: usize) -> Vec<usize> {
        self.neighbors_in(self.point(v)).into_iter().map(|x| self.index(x)).collect()
    }
}

/// A digraph stored as explicit adjacency lists.
#[derive(Clone, Debug)]
pub struct ExplicitDigraph {
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl ExplicitDigraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for &(u, v) in edges {
            out[u].push(v);
            inc[v].push(u);
        }
        ExplicitDigraph { out, inc }
    }

    /// The directed path `0 -> 1 -> ... -> n-1`.
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::from_edges(n, &edges)
    }
}

impl Digraph for ExplicitDigraph {
    fn vertex_count(&self) -> usize {
        self.out.len()
    }

    fn out_neighbors(&self, v: usize) -> Vec<usize> {
        self.out[v].clone()
    }

    fn in_neighbors(&self, v: usize) -> Vec<usize> {
        self.inc[v].clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalityMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalityWitness {
    pub x: usize,
    pub y: usize,
    /// Common out-neighbours of `x` and `y`.
    pub n_plus: usize,
    /// Common in-neighbours of `x` and `y`.
    pub n_minus: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalityReport {
    pub normal: bool,
    pub pairs_checked: u64,
    pub witness: Option<NormalityWitness>,
}

fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Check `|N+(x, y)| = |N-(x, y)|` for vertex pairs: all unordered pairs in
/// exhaustive mode, random pairs otherwise. The witness on failure is the
/// first violating pair in scan order.
pub fn is_normal<G: Digraph + Sync>(g: &G, mode: NormalityMode) -> Result<NormalityReport> {
    let n = g.vertex_count();
    let sorted = |mut v: Vec<usize>| {
        v.sort_unstable();
        v.dedup();
        v
    };
    let check = |outs: &[Vec<usize>], ins: &[Vec<usize>], x: usize, y: usize| {
        let n_plus = sorted_intersection_len(&outs[x], &outs[y]);
        let n_minus = sorted_intersection_len(&ins[x], &ins[y]);
        (n_plus != n_minus).then_some(NormalityWitness { x, y, n_plus, n_minus })
    };
    match mode {
        NormalityMode::Exhaustive => {
            ensure_cap("vertex set (exhaustive normality)", n as u64, MAX_ORACLE_VERTICES)?;
            let outs: Vec<Vec<usize>> = par::map_range(n, |v| sorted(g.out_neighbors(v)));
            let ins: Vec<Vec<usize>> = par::map_range(n, |v| sorted(g.in_neighbors(v)));
            let first = par::map_range(n, |x| (x..n).find_map(|y| check(&outs, &ins, x, y)));
            let witness = first.into_iter().flatten().next();
            Ok(NormalityReport {
                normal: witness.is_none(),
                pairs_checked: (n as u64) * (n as u64 + 1) / 2,
                witness,
            })
        }
        NormalityMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pairs: Vec<(usize, usize)> =
                (0..count).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
            let found = par::map_slice(&pairs, |&(x, y)| {
                let ox = sorted(g.out_neighbors(x));
                let oy = sorted(g.out_neighbors(y));
                let ix = sorted(g.in_neighbors(x));
                let iy = sorted(g.in_neighbors(y));
                let n_plus = sorted_intersection_len(&ox, &oy);
                let n_minus = sorted_intersection_len(&ix, &iy);
                (n_plus != n_minus).then_some(NormalityWitness { x, y, n_plus, n_minus })
            });
            let witness = found.into_iter().flatten().next();
            Ok(NormalityReport { normal: witness.is_none(), pairs_checked: count as u64, witness })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumMethod {
    /// `O(n |S|)` character summation.
    Direct,
    /// `O(n log n)` multidimensional FFT of the indicator of `S`.
    Transform,
}

/// All eigenvalues `lambda_xi`, indexed like the vertices (`xi1 * q + xi2`).
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<Complex64>,
    /// `lambda_0 = |S|`.
    pub degree: usize,
    /// `max_{xi != 0} |lambda_xi|` (0 for a single vertex).
    pub lambda: f64,
    /// Index of a frequency attaining `lambda`.
    pub lambda_at: usize,
    /// `|sum_xi lambda_xi - n [0 in S]| / (n max(|S|, 1))`.
    pub trace_error: f64,
    /// `|sum_xi |lambda_xi|^2 - n |S|| / max(n |S|, 1)`.
    pub frobenius_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumSummary {
    pub n: usize,
    pub degree: usize,
    pub lambda: f64,
    pub lambda_at: Point,
    pub lambda_over_degree: f64,
    pub trace_error: f64,
    pub frobenius_error: f64,
}

impl Spectrum {
    pub fn summary(&self, g: &CayleyDigraph) -> SpectrumSummary {
        SpectrumSummary {
            n: self.values.len(),
            degree: self.degree,
            lambda: self.lambda,
            lambda_at: g.point(self.lambda_at),
            lambda_over_degree: if self.degree == 0 { 0.0 } else { self.lambda / self.degree as f64 },
            trace_error: self.trace_error,
            frobenius_error: self.frobenius_error,
        }
    }

    pub fn at(&self, g: &CayleyDigraph, xi: Point) -> Complex64 {
        self.values[g.index(xi)]
    }
}

/// The full spectrum of `g`. Both the trace identity
/// `sum lambda = n [0 in S]` and the Frobenius identity
/// `sum |lambda|^2 = n |S|` are checked on every call.
pub fn spectrum(g: &CayleyDigraph, method: SpectrumMethod) -> Result<Spectrum> {
    let values = match method {
        SpectrumMethod::Direct => direct_values(g),
        SpectrumMethod::Transform => transform_values(g),
    };
    finish_spectrum(g, values)
}

fn direct_values(g: &CayleyDigraph) -> Vec<Complex64> {
    let roots = UnitRoots::new(g.character_order());
    let ctx = g.ctx();
    par::map_range(g.n(), |idx| {
        let xi = g.point(idx);
        g.gens.iter().map(|&s| roots.get(ctx.pairing(xi, s))).sum()
    })
}

fn transform_values(g: &CayleyDigraph) -> Vec<Complex64> {
    let ctx = g.ctx();
    let n = g.n();
    let (len, dims) = match ctx.kind() {
        RingKind::ExtensionField => (ctx.characteristic() as usize, 2 * ctx.degree() as usize),
        _ => (ctx.order() as usize, 2),
    };
    let mut data: Vec<Complex64> = g
        .member
        .iter()
        .map(|&m| if m { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
        .collect();
    dft_nd(&mut data, len, dims);
    if ctx.kind() != RingKind::ExtensionField {
        return data;
    }
    // Tr(xi . x) equals the digit-vector dot product of x with the trace
    // dual of xi, so lambda_xi is the transform at the dual frequency.
    let q = ctx.order() as usize;
    let dual: Vec<usize> = ctx.elements().map(|e| ctx.trace_dual(e).0 as usize).collect();
    par::map_range(n, |idx| data[dual[idx / q] * q + dual[idx % q]])
}

/// Unnormalized `exp(+2 pi i <j, k> / len)` transform over `Z_len^dims`,
/// row-major with the last axis contiguous.
pub(crate) fn dft_nd(data: &mut Vec<Complex64>, len: usize, dims: usize) {
    if data.len() <= 1 {
        return;
    }
    let fft: std::sync::Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_inverse(len);
    let rest = data.len() / len;
    let rows_per_block = (4096 / len).max(1);
    let mut scratch_buf = vec![Complex64::default(); data.len()];
    for _ in 0..dims {
        // Transform along the contiguous axis.
        par::for_each_chunk_mut(data, len * rows_per_block, |_, block| {
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(block, &mut scratch);
        });
        // Rotate axes: [rest, len] -> [len, rest].
        let src: &[Complex64] = data;
        par::for_each_chunk_mut(&mut scratch_buf, rest, |j, out| {
            for (i, slot) in out.iter_mut().enumerate() {
                *slot = src[i * len + j];
            }
        });
        std::mem::swap(data, &mut scratch_buf);
    }
}

fn finish_spectrum(g: &CayleyDigraph, values: Vec<Complex64>) -> Result<Spectrum> {
    let n = values.len();
    let d = g.degree();
    let (mut lambda, mut lambda_at) = (0.0f64, 0usize);
    for (idx, v) in values.iter().enumerate().skip(1) {
        let mag = v.norm();
        if mag > lambda {
            lambda = mag;
            lambda_at = idx;
        }
    }
    let total: Complex64 = values.iter().sum();
    let energy: f64 = values.iter().map(|v| v.norm_sqr()).sum();
    let zero_in_s = usize::from(g.is_generator((Elem::ZERO, Elem::ZERO)));
    let scale = (n * d.max(1)) as f64;
    let trace_error = (total - Complex64::new((n * zero_in_s) as f64, 0.0)).norm() / scale;
    let frobenius_error = (energy - (n * d) as f64).abs() / scale;
    let lambda0_error = (values[0] - Complex64::new(d as f64, 0.0)).norm();
    if trace_error > IDENTITY_TOLERANCE
        || frobenius_error > IDENTITY_TOLERANCE
        || lambda0_error > 1e-9 * d.max(1) as f64
        || lambda > d as f64 * (1.0 + 1e-9) + 1e-9
    {
        return Err(Error::InvariantViolated(format!(
            "spectrum identities: trace {trace_error:e}, frobenius {frobenius_error:e}, \
             lambda_0 {lambda0_error:e}, lambda {lambda} vs degree {d}"
        )));
    }
    Ok(Spectrum { values, degree: d, lambda, lambda_at, trace_error, frobenius_error })
}

/// `lambda(G_a)` for each listed level `a` of `P`, from one value table.
pub fn level_lambdas(p: &BiPoly, levels: &[Elem]) -> Result<Vec<(Elem, usize, f64)>> {
    let table = p.value_table()?;
    let ctx = p.ctx();
    let out: Vec<Result<(Elem, usize, f64)>> = par::map_slice(levels, |&a| {
        let g = CayleyDigraph::from_value_table(ctx, &table, a)?;
        let s = spectrum(&g, SpectrumMethod::Transform)?;
        Ok((a, s.degree, s.lambda))
    });
    out.into_iter().collect()
}

/// `||A v_xi - lambda_xi v_xi||_inf` with `A` applied through explicit
/// adjacency lists and `v_xi = (chi_xi(y))_y`.
pub fn eigen_residual_oracle(g: &CayleyDigraph, xi: Point) -> Result<f64> {
    ensure_cap("vertex set (residual oracle)", g.n() as u64, MAX_ORACLE_VERTICES)?;
    let ctx = g.ctx();
    let roots = UnitRoots::new(g.character_order());
    let v: Vec<Complex64> = (0..g.n()).map(|y| roots.get(ctx.pairing(xi, g.point(y)))).collect();
    let lambda: Complex64 = g.gens.iter().map(|&s| roots.get(ctx.pairing(xi, s))).sum();
    let adjacency: Vec<Vec<usize>> = par::map_range(g.n(), |y| g.out_neighbors(y));
    let residual = adjacency
        .iter()
        .enumerate()
        .map(|(y, outs)| {
            let av: Complex64 = outs.iter().map(|&z| v[z]).sum();
            (av - lambda * v[y]).norm()
        })
        .fold(0.0, f64::max);
    Ok(residual)
}

/// Random generator set of the given size (seeded), for tests and demos.
pub fn random_generators(ctx: &RingCtx, size: usize, seed: u64) -> Vec<Point> {
    let q = ctx.order();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let cap = (q as usize) * (q as usize);
    while seen.len() < size.min(cap) {
        seen.insert((Elem(rng.gen_range(0..q)), Elem(rng.gen_range(0..q))));
    }
    let mut v: Vec<Point> = seen.into_iter().collect();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> RingCtx {
        RingCtx::prime_field(p).unwrap()
    }

    fn hyperbola_f5() -> CayleyDigraph {
        let p = BiPoly::parse("x1*x2", &f(5)).unwrap();
        CayleyDigraph::from_level(&p, Elem(1)).unwrap()
    }

    #[test]
    fn build_examples() {
        let ctx = f(5);
        let empty = CayleyDigraph::build(&ctx, []).unwrap();
        assert_eq!((empty.degree(), empty.n()), (0, 25));
        let all: Vec<Point> = ctx.elements().flat_map(|a| ctx.elements().map(move |b| (a, b))).collect();
        let complete = CayleyDigraph::build(&ctx, all).unwrap();
        assert_eq!(complete.degree(), 25);
        let g = hyperbola_f5();
        assert_eq!((g.degree(), g.n()), (4, 25));
        assert!(CayleyDigraph::build(&ctx, [(Elem(5), Elem(0))]).is_err());
    }

    #[test]
    fn neighbours() {
        let g = hyperbola_f5();
        let x = (Elem(2), Elem(0));
        let outs = g.neighbors_out(x);
        assert!(outs.contains(&(Elem(3), Elem(1))));
        for y in outs {
            assert!(g.neighbors_in(y).contains(&x));
        }
    }

    #[test]
    fn hyperbola_spectrum_values() {
        let g = hyperbola_f5();
        let s = spectrum(&g, SpectrumMethod::Direct).unwrap();
        assert_eq!(s.degree, 4);
        assert!((s.values[0].re - 4.0).abs() < 1e-12);
        // sum over t != 0 of e((t + 2/t)/5), by hand with a table of e(k/5).
        let e = |k: u32| crate::algebra::unit_root(k as u64, 5);
        let by_hand: Complex64 = (1..5u32)
            .map(|t| {
                let inv = (1..5u32).find(|u| t * u % 5 == 1).unwrap();
                e((t + 2 * inv) % 5)
            })
            .sum();
        let v = s.at(&g, (Elem(1), Elem(2)));
        assert!((v - by_hand).norm() < 1e-12);
        assert!((v.re - (-3.2360679775)).abs() < 1e-9 && v.im.abs() < 1e-12);
        assert!((s.lambda - 3.2360679775).abs() < 1e-9);
        assert!(s.lambda <= 2.0 * 5f64.sqrt());
    }

    #[test]
    fn direct_and_transform_agree() {
        let cases = [
            RingCtx::modular(12).unwrap(),
            RingCtx::modular(15).unwrap(),
            f(7),
            RingCtx::field(3, 2).unwrap(),
            RingCtx::field(2, 3).unwrap(),
            RingCtx::field(5, 2).unwrap(),
        ];
        for (k, ctx) in cases.iter().enumerate() {
            let q = ctx.order() as usize;
            let gens = random_generators(ctx, (q * q) / 5 + 1, k as u64);
            let g = CayleyDigraph::build(ctx, gens).unwrap();
            let a = spectrum(&g, SpectrumMethod::Direct).unwrap();
            let b = spectrum(&g, SpectrumMethod::Transform).unwrap();
            for (x, y) in a.values.iter().zip(&b.values) {
                assert!((x - y).norm() <= 1e-6, "{ctx:?}");
            }
            assert!((a.lambda - b.lambda).abs() <= 1e-6);
        }
    }

    #[test]
    fn trivial_graphs() {
        let ctx = f(3);
        let empty = CayleyDigraph::build(&ctx, []).unwrap();
        let s = spectrum(&empty, SpectrumMethod::Transform).unwrap();
        assert_eq!(s.lambda, 0.0);
        assert_eq!(eigen_residual_oracle(&empty, (Elem(1), Elem(2))).unwrap(), 0.0);
        let all: Vec<Point> = ctx.elements().flat_map(|a| ctx.elements().map(move |b| (a, b))).collect();
        let complete = CayleyDigraph::build(&ctx, all).unwrap();
        let s = spectrum(&complete, SpectrumMethod::Direct).unwrap();
        assert!(s.lambda < 1e-9);
    }

    #[test]
    fn residual_oracle_small() {
        let ctx = RingCtx::modular(7).unwrap();
        let g = CayleyDigraph::build(&ctx, random_generators(&ctx, 5, 11)).unwrap();
        for idx in 0..g.n() {
            assert!(eigen_residual_oracle(&g, g.point(idx)).unwrap() <= 1e-10);
        }
        assert!(eigen_residual_oracle(&g, (Elem(0), Elem(0))).unwrap() < 1e-12);
    }

    #[test]
    fn cayley_graphs_are_normal_and_the_path_is_not() {
        let ctx = RingCtx::modular(5).unwrap();
        for seed in 0..5 {
            let g = CayleyDigraph::build(&ctx, random_generators(&ctx, 3 + seed as usize, seed)).unwrap();
            let r = is_normal(&g, NormalityMode::Exhaustive).unwrap();
            assert!(r.normal && r.witness.is_none());
            assert_eq!(r.pairs_checked, 25 * 26 / 2);
            let s = is_normal(&g, NormalityMode::Sampled { count: 200, seed }).unwrap();
            assert!(s.normal);
        }
        let path = ExplicitDigraph::path(3);
        let r = is_normal(&path, NormalityMode::Exhaustive).unwrap();
        assert!(!r.normal);
        let w = r.witness.unwrap();
        assert_ne!(w.n_plus, w.n_minus);
        // Vertex 0 has one out-neighbour and no in-neighbour.
        assert_eq!((w.x, w.y, w.n_plus, w.n_minus), (0, 0, 1, 0));
    }

    #[test]
    fn diagonal_pairs_count_degree() {
        let g = hyperbola_f5();
        let outs = g.out_neighbors(7);
        let ins = g.in_neighbors(7);
        assert_eq!(outs.len(), g.degree());
        assert_eq!(ins.len(), g.degree());
    }

    #[test]
    fn level_lambdas_matches_single_spectrum() {
        let p = BiPoly::parse("x1*x2", &f(7)).unwrap();
        let rows = level_lambdas(&p, &[Elem(1), Elem(3)]).unwrap();
        for (a, d, lam) in rows {
            let g = CayleyDigraph::from_level(&p, a).unwrap();
            let s = spectrum(&g, SpectrumMethod::Direct).unwrap();
            assert_eq!(d, s.degree);
            assert!((lam - s.lambda).abs() < 1e-9);
        }
    }

    #[test]
    fn oracle_caps() {
        let ctx = f(101);
        let g = CayleyDigraph::build(&ctx, [(Elem(1), Elem(1))]).unwrap();
        assert!(matches!(eigen_residual_oracle(&g, (Elem(0), Elem(1))), Err(Error::TooLarge { .. })));
        assert!(matches!(is_normal(&g, NormalityMode::Exhaustive), Err(Error::TooLarge { .. })));
    }
}
