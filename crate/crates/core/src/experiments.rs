//! Test sets, sum/product/image/distance sets, and the growth inequalities
//! with their implied constant measured on a corpus.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{self, Elem, Point, RingCtx, RingKind};
use crate::bipoly::BiPoly;
use crate::error::{ensure_cap, Error, Result};
use crate::par;

/// Cap on the number of pairs a set operation may enumerate.
pub const MAX_PAIRS: u64 = 100_000_000;

/// Seed used by `random` set specs that do not name one.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SetSpec {
    /// `{1, ..., n}`.
    Interval { n: usize },
    ArithProgression { start: i64, step: i64, n: usize },
    /// `{1, r, ..., r^{n-1}}`.
    Geometric { ratio: i64, n: usize },
    Random { n: usize, seed: u64 },
    /// The prime subfield of an extension field.
    Subfield,
    Explicit { values: Vec<i64> },
}

fn parse_num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidSet(format!("bad {what}: {s:?}")))
}

impl SetSpec {
    /// Parse `interval:10`, `ap:3:2:10`, `geometric:2:8`, `random:20`,
    /// `random:20:seed=7`, `subfield` or `explicit:1,2,3`.
    pub fn parse(text: &str, default_seed: u64) -> Result<Self> {
        let parts: Vec<&str> = text.trim().split(':').collect();
        let arity = |n: usize| {
            if parts.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidSet(format!("{text:?}: expected {} fields", n - 1)))
            }
        };
        match parts[0] {
            "interval" => {
                arity(2)?;
                Ok(SetSpec::Interval { n: parse_num(parts[1], "size")? })
            }
            "ap" => {
                arity(4)?;
                Ok(SetSpec::ArithProgression {
                    start: parse_num(parts[1], "start")?,
                    step: parse_num(parts[2], "step")?,
                    n: parse_num(parts[3], "size")?,
                })
            }
            "geometric" => {
                arity(3)?;
                Ok(SetSpec::Geometric { ratio: parse_num(parts[1], "ratio")?, n: parse_num(parts[2], "size")? })
            }
            "random" => {
                let n = parse_num(parts.get(1).copied().unwrap_or(""), "size")?;
                let seed = match parts.get(2) {
                    None => default_seed,
                    Some(s) => parse_num(s.strip_prefix("seed=").unwrap_or(s), "seed")?,
                };
                if parts.len() > 3 {
                    return Err(Error::InvalidSet(format!("{text:?}: too many fields")));
                }
                Ok(SetSpec::Random { n, seed })
            }
            "subfield" => {
                arity(1)?;
                Ok(SetSpec::Subfield)
            }
            "explicit" => {
                arity(2)?;
                let values = parts[1]
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse_num(s, "element"))
                    .collect::<Result<_>>()?;
                Ok(SetSpec::Explicit { values })
            }
            other => Err(Error::InvalidSet(format!("unknown set kind {other:?}"))),
        }
    }

    /// Generate the set. Every kind must produce exactly the requested
    /// number of distinct elements.
    pub fn generate(&self, ctx: &RingCtx) -> Result<Vec<Elem>> {
        let q = ctx.order() as usize;
        let too_big = |n: usize| {
            if n > q {
                Err(Error::InvalidSet(format!("{n} distinct elements requested from a ring of order {q}")))
            } else {
                Ok(())
            }
        };
        let set = match *self {
            SetSpec::Interval { n } => {
                too_big(n)?;
                (1..=n as i64).map(|i| ctx.from_int(i)).collect()
            }
            SetSpec::ArithProgression { start, step, n } => {
                too_big(n)?;
                let (s, d) = (ctx.from_int(start), ctx.from_int(step));
                let mut cur = s;
                (0..n)
                    .map(|_| {
                        let v = cur;
                        cur = ctx.add(cur, d);
                        v
                    })
                    .collect()
            }
            SetSpec::Geometric { ratio, n } => {
                too_big(n)?;
                let r = ctx.from_int(ratio);
                let mut cur = ctx.one();
                (0..n)
                    .map(|_| {
                        let v = cur;
                        cur = ctx.mul(cur, r);
                        v
                    })
                    .collect()
            }
            SetSpec::Random { n, seed } => {
                too_big(n)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut v: Vec<Elem> = sample(&mut rng, q, n).into_iter().map(|i| Elem(i as u32)).collect();
                v.sort_unstable();
                v
            }
            SetSpec::Subfield => {
                if ctx.kind() != RingKind::ExtensionField {
                    return Err(Error::WrongKind { expected: "extension field", found: ctx.kind() });
                }
                (0..ctx.characteristic()).map(Elem).collect()
            }
            SetSpec::Explicit { ref values } => values.iter().map(|&v| ctx.from_int(v)).collect(),
        };
        distinct(set)
    }
}

fn distinct(set: Vec<Elem>) -> Result<Vec<Elem>> {
    let mut sorted = set.clone();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidSet(format!("element {} repeats", w[0].code())));
    }
    Ok(set)
}

impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetSpec::Interval { n } => write!(f, "interval:{n}"),
            SetSpec::ArithProgression { start, step, n } => write!(f, "ap:{start}:{step}:{n}"),
            SetSpec::Geometric { ratio, n } => write!(f, "geometric:{ratio}:{n}"),
            SetSpec::Random { n, seed } => write!(f, "random:{n}:seed={seed}"),
            SetSpec::Subfield => write!(f, "subfield"),
            SetSpec::Explicit { values } => {
                let v: Vec<String> = values.iter().map(i64::to_string).collect();
                write!(f, "explicit:{}", v.join(","))
            }
        }
    }
}

/// Point sets in the plane.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PointSetSpec {
    Plane,
    Random { n: usize, seed: u64 },
    /// `A x A` for a set spec `A`.
    Product { factor: SetSpec },
    Explicit { points: Vec<(i64, i64)> },
}

impl PointSetSpec {
    /// Parse `plane`, `random:N[:seed=S]`, `product:<set spec>` or
    /// `explicit:x,y;x,y;...`.
    pub fn parse(text: &str, default_seed: u64) -> Result<Self> {
        let text = text.trim();
        let (head, rest) = text.split_once(':').unwrap_or((text, ""));
        match head {
            "plane" if rest.is_empty() => Ok(PointSetSpec::Plane),
            "random" => match SetSpec::parse(text, default_seed)? {
                SetSpec::Random { n, seed } => Ok(PointSetSpec::Random { n, seed }),
                _ => unreachable!(),
            },
            "product" => Ok(PointSetSpec::Product { factor: SetSpec::parse(rest, default_seed)? }),
            "explicit" => {
                let points = rest
                    .split(';')
                    .filter(|s| !s.trim().is_empty())
                    .map(|pt| {
                        let (x, y) = pt
                            .split_once(',')
                            .ok_or_else(|| Error::InvalidSet(format!("bad point {pt:?}")))?;
                        Ok((parse_num(x, "coordinate")?, parse_num(y, "coordinate")?))
                    })
                    .collect::<Result<_>>()?;
                Ok(PointSetSpec::Explicit { points })
            }
            _ => Err(Error::InvalidSet(format!("unknown point set {text:?}"))),
        }
    }

    pub fn generate(&self, ctx: &RingCtx) -> Result<Vec<Point>> {
        let q = ctx.order() as usize;
        let pts: Vec<Point> = match self {
            PointSetSpec::Plane => {
                ensure_cap("plane", (q * q) as u64, MAX_PAIRS)?;
                ctx.elements().flat_map(|x| ctx.elements().map(move |y| (x, y))).collect()
            }
            PointSetSpec::Random { n, seed } => {
                if *n > q * q {
                    return Err(Error::InvalidSet(format!("{n} points requested from a plane of {} points", q * q)));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut v: Vec<Point> = sample(&mut rng, q * q, *n)
                    .into_iter()
                    .map(|i| (Elem((i / q) as u32), Elem((i % q) as u32)))
                    .collect();
                v.sort_unstable();
                v
            }
            PointSetSpec::Product { factor } => {
                let a = factor.generate(ctx)?;
                a.iter().flat_map(|&x| a.iter().map(move |&y| (x, y))).collect()
            }
            PointSetSpec::Explicit { points } => {
                points.iter().map(|&(x, y)| (ctx.from_int(x), ctx.from_int(y))).collect()
            }
        };
        let mut sorted = pts.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != pts.len() {
            return Err(Error::InvalidSet("repeated point".into()));
        }
        Ok(pts)
    }
}

impl fmt::Display for PointSetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointSetSpec::Plane => write!(f, "plane"),
            PointSetSpec::Random { n, seed } => write!(f, "random:{n}:seed={seed}"),
            PointSetSpec::Product { factor } => write!(f, "product:{factor}"),
            PointSetSpec::Explicit { points } => {
                let v: Vec<String> = points.iter().map(|(x, y)| format!("{x},{y}")).collect();
                write!(f, "explicit:{}", v.join(";"))
            }
        }
    }
}

/// Collect the distinct values of `f(i, j)` over `i < n1, j < n2`, sorted.
fn pair_image<F>(order: u32, n1: usize, n2: usize, f: F) -> Result<Vec<Elem>>
where
    F: Fn(usize, usize) -> Option<Elem>,
{
    ensure_cap("pairs", n1 as u64 * n2 as u64, MAX_PAIRS)?;
    let mut seen = vec![false; order as usize];
    for i in 0..n1 {
        for j in 0..n2 {
            if let Some(v) = f(i, j) {
                seen[v.code() as usize] = true;
            }
        }
    }
    Ok(seen
        .iter()
        .enumerate()
        .filter(|(_, &s)| s)
        .map(|(i, _)| Elem(i as u32))
        .collect())
}

/// `A + A`, sorted.
pub fn sumset(ctx: &RingCtx, a: &[Elem]) -> Result<Vec<Elem>> {
    pair_image(ctx.order(), a.len(), a.len(), |i, j| Some(ctx.add(a[i], a[j])))
}

/// `A . A`, sorted.
pub fn productset(ctx: &RingCtx, a: &[Elem]) -> Result<Vec<Elem>> {
    pair_image(ctx.order(), a.len(), a.len(), |i, j| Some(ctx.mul(a[i], a[j])))
}

/// `P(A) = {P(x1, x2) : x1, x2 in A}`, sorted.
pub fn image_set(p: &BiPoly, a: &[Elem]) -> Result<Vec<Elem>> {
    pair_image(p.ctx().order(), a.len(), a.len(), |i, j| Some(p.eval((a[i], a[j]))))
}

/// `{P(y - x) : x != y in A}`, sorted. Both orientations are included, so
/// the result is also correct for non-symmetric `P`.
pub fn distance_set(p: &BiPoly, pts: &[Point]) -> Result<Vec<Elem>> {
    let ctx = p.ctx();
    ensure_cap("pairs", pts.len() as u64 * pts.len() as u64, MAX_PAIRS)?;
    let table = p.value_table()?;
    let q = ctx.order() as usize;
    pair_image(ctx.order(), pts.len(), pts.len(), |i, j| {
        (i != j).then(|| {
            let (x, y) = (pts[i], pts[j]);
            table[ctx.sub(y.0, x.0).code() as usize * q + ctx.sub(y.1, x.1).code() as usize]
        })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    InRange,
    OutOfRange,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Inequality {
    SumImage,
    SumProductModular,
    Distance,
}

/// One instance of a growth inequality `lhs >= delta * rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremCheck {
    pub inequality: Inequality,
    pub set_size: usize,
    pub lhs: u64,
    pub rhs_at_delta_1: f64,
    /// `lhs / rhs_at_delta_1`.
    pub empirical_delta: f64,
    pub regime: Regime,
    pub note: Option<String>,
}

impl TheoremCheck {
    fn new(inequality: Inequality, set_size: usize, lhs: u64, rhs: f64, in_range: bool, note: Option<String>) -> Self {
        let empirical_delta = if rhs > 0.0 { lhs as f64 / rhs } else { f64::INFINITY };
        TheoremCheck {
            inequality,
            set_size,
            lhs,
            rhs_at_delta_1: rhs,
            empirical_delta,
            regime: if in_range { Regime::InRange } else { Regime::OutOfRange },
            note,
        }
    }

    /// `lhs >= delta * rhs_at_delta_1`.
    pub fn holds_at(&self, delta: f64) -> bool {
        self.lhs as f64 >= delta * self.rhs_at_delta_1 * (1.0 - 1e-12)
    }
}

fn require_nonempty<T>(a: &[T]) -> Result<()> {
    if a.is_empty() {
        return Err(Error::InvalidSet("empty set".into()));
    }
    Ok(())
}

/// `max{|A+A|, |P(A)|}` against
/// `|A| min{(|A|^2 / (k^4 q))^{1/4}, (q / (k |A|))^{1/3}}` over a field,
/// nontrivial for `k^2 q^{1/2} < |A| < q / k`.
pub fn theorem1_check(p: &BiPoly, a: &[Elem]) -> Result<TheoremCheck> {
    let ctx = p.ctx();
    if !ctx.is_field() {
        return Err(Error::WrongKind { expected: "field", found: ctx.kind() });
    }
    require_nonempty(a)?;
    if p.degeneracy_test()?.is_degenerate() {
        return Err(Error::DegenerateInput);
    }
    let lhs = sumset(ctx, a)?.len().max(image_set(p, a)?.len()) as u64;
    let (n, k, q) = (a.len() as f64, p.degree() as f64, ctx.order() as f64);
    let rhs = n * ((n * n / (k.powi(4) * q)).powf(0.25)).min((q / (k * n)).cbrt());
    let in_range = k * k * q.sqrt() < n && n < q / k;
    let note = (!in_range).then(|| format!("|A| = {n} outside ({}, {})", k * k * q.sqrt(), q / k));
    Ok(TheoremCheck::new(Inequality::SumImage, a.len(), lhs, rhs, in_range, note))
}

/// `max{|A+A|, |A.A|}` against
/// `|A| min{gamma(m)^{1/4} |A|^{1/2} / m^{1/2}, (m / |A|)^{1/3}}` over Z_m,
/// nontrivial for `m / gamma(m)^{1/2} < |A| < m` with `m` odd.
pub fn theorem2_check(ctx: &RingCtx, a: &[Elem]) -> Result<TheoremCheck> {
    if ctx.kind() == RingKind::ExtensionField {
        return Err(Error::WrongKind { expected: "Z_m", found: ctx.kind() });
    }
    require_nonempty(a)?;
    let m = ctx.order() as u64;
    let gamma = algebra::gamma(m);
    let lhs = sumset(ctx, a)?.len().max(productset(ctx, a)?.len()) as u64;
    let (n, mf, gf) = (a.len() as f64, m as f64, gamma as f64);
    let rhs = n * (gf.powf(0.25) * n.sqrt() / mf.sqrt()).min((mf / n).cbrt());
    let lower = mf / gf.sqrt();
    let mut notes = Vec::new();
    if m.is_multiple_of(2) {
        notes.push("even modulus: outside the verified regime".to_string());
    }
    if !(lower < n && n < mf) {
        notes.push(format!("|A| = {n} outside ({lower}, {m})"));
    }
    if gf < mf.log2() {
        notes.push(format!("gamma(m) = {gamma} < log2(m): the bound is weak unless m has few, large prime factors"));
    }
    let in_range = m % 2 == 1 && lower < n && n < mf;
    let note = (!notes.is_empty()).then(|| notes.join("; "));
    Ok(TheoremCheck::new(Inequality::SumProductModular, a.len(), lhs, rhs, in_range, note))
}

/// `|Delta_P(A)|` against `min{|A| / (k^2 q^{1/2}), q / k}` for symmetric
/// non-degenerate `P`. Counted as in range when `|A| > k q`.
pub fn distance_check(p: &BiPoly, pts: &[Point]) -> Result<TheoremCheck> {
    let ctx = p.ctx();
    if !ctx.is_field() {
        return Err(Error::WrongKind { expected: "field", found: ctx.kind() });
    }
    require_nonempty(pts)?;
    if !p.is_symmetric()? {
        return Err(Error::NotSymmetric);
    }
    if p.degeneracy_test()?.is_degenerate() {
        return Err(Error::DegenerateInput);
    }
    let lhs = distance_set(p, pts)?.len() as u64;
    let (n, k, q) = (pts.len() as f64, p.degree() as f64, ctx.order() as f64);
    let rhs = (n / (k * k * q.sqrt())).min(q / k);
    let in_range = n > k * q;
    let note = (!in_range).then(|| format!("|A| = {n} <= k q = {}", k * q));
    Ok(TheoremCheck::new(Inequality::Distance, pts.len(), lhs, rhs, in_range, note))
}

/// The largest `delta` with `lhs >= delta * rhs` on every member: the
/// minimum empirical delta. All members must be in range.
pub fn calibrate_delta(corpus: &[TheoremCheck]) -> Result<f64> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if let Some(i) = corpus.iter().position(|c| c.regime != Regime::InRange) {
        return Err(Error::OutOfRegime(i));
    }
    Ok(corpus.iter().map(|c| c.empirical_delta).fold(f64::INFINITY, f64::min))
}

/// One corpus entry, described by text so reports can name it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "inequality", rename_all = "kebab-case")]
pub enum CorpusJob {
    SumImage { field: String, poly: String, set: SetSpec },
    SumProductModular { modulus: u32, set: SetSpec },
    Distance { field: String, poly: String, points: PointSetSpec },
}

impl fmt::Display for CorpusJob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusJob::SumImage { field, poly, set } => write!(f, "sum-image q={field} P={poly} A={set}"),
            CorpusJob::SumProductModular { modulus, set } => write!(f, "sum-product m={modulus} A={set}"),
            CorpusJob::Distance { field, poly, points } => write!(f, "distance q={field} P={poly} A={points}"),
        }
    }
}

impl CorpusJob {
    pub fn run(&self) -> Result<TheoremCheck> {
        match self {
            CorpusJob::SumImage { field, poly, set } => {
                let ctx = RingCtx::parse_field(field)?;
                let p = BiPoly::parse(poly, &ctx)?;
                theorem1_check(&p, &set.generate(&ctx)?)
            }
            CorpusJob::SumProductModular { modulus, set } => {
                let ctx = RingCtx::modular(*modulus)?;
                theorem2_check(&ctx, &set.generate(&ctx)?)
            }
            CorpusJob::Distance { field, poly, points } => {
                let ctx = RingCtx::parse_field(field)?;
                let p = BiPoly::parse(poly, &ctx)?;
                distance_check(&p, &points.generate(&ctx)?)
            }
        }
    }

    pub fn inequality(&self) -> Inequality {
        match self {
            CorpusJob::SumImage { .. } => Inequality::SumImage,
            CorpusJob::SumProductModular { .. } => Inequality::SumProductModular,
            CorpusJob::Distance { .. } => Inequality::Distance,
        }
    }
}

/// Run every job, in parallel across jobs; results keep the input order.
pub fn run_corpus(jobs: &[CorpusJob]) -> Vec<Result<TheoremCheck>> {
    par::map_slice(jobs, CorpusJob::run)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusRole {
    Calibration,
    HeldOut,
}

/// Smallest generator of `F_p^*`.
fn primitive_root(p: u32) -> u32 {
    let factors = algebra::factorize(p as u64 - 1);
    (2..p)
        .find(|&g| {
            factors.iter().all(|&(f, _)| {
                let ctx = RingCtx::prime_field(p).expect("prime");
                ctx.pow(Elem(g), (p as u64 - 1) / f) != Elem::ONE
            })
        })
        .unwrap_or(1)
}

/// Sizes inside the open window `(lo, hi)`: `2 count + 1` points spread
/// evenly from edge to edge. The even-numbered ones, which include both
/// edges, are for calibration; the odd-numbered ones are held out.
fn window_sizes(lo: f64, hi: f64, count: usize, role: CorpusRole) -> Vec<usize> {
    let (a, b) = (lo.floor() as usize + 1, hi.ceil() as usize - 1);
    if a > b || count == 0 {
        return Vec::new();
    }
    let slots = 2 * count;
    let pick = |j: usize| a + ((j * (b - a)) as f64 / slots as f64).round() as usize;
    let cal: Vec<usize> = (0..=slots).step_by(2).map(pick).collect();
    let mut v: Vec<usize> = match role {
        CorpusRole::Calibration => cal,
        CorpusRole::HeldOut => (1..slots).step_by(2).map(pick).filter(|n| !cal.contains(n)).collect(),
    };
    v.dedup();
    v
}

/// The standard in-range corpora: intervals, arithmetic and geometric
/// progressions, and random sets, for fields of order 101, 199, 499 and
/// moduli 91, 143. The two roles use disjoint sizes and seeds.
pub fn standard_corpus(role: CorpusRole) -> Vec<CorpusJob> {
    let seed_base = match role {
        CorpusRole::Calibration => 1_000,
        CorpusRole::HeldOut => 2_000_000,
    };
    let mut jobs = Vec::new();
    let polys = ["x1*x2", "x1^2 + x2^2", "x1*x2 + x1 + x2", "x1^2 + x1*x2 + 3*x2"];
    for (qi, q) in [101u32, 199, 499].into_iter().enumerate() {
        let qf = q as f64;
        let sizes = window_sizes(4.0 * qf.sqrt(), qf / 2.0, 6, role);
        let g = primitive_root(q) as i64;
        for (pi, poly) in polys.iter().enumerate() {
            for (si, &n) in sizes.iter().enumerate() {
                let seed = seed_base + (qi * 1000 + pi * 100 + si) as u64;
                let mut sets = vec![
                    SetSpec::Interval { n },
                    SetSpec::ArithProgression { start: 3 + si as i64, step: 7, n },
                    SetSpec::Random { n, seed },
                ];
                if n < q as usize {
                    sets.push(SetSpec::Geometric { ratio: g, n });
                }
                for set in sets {
                    jobs.push(CorpusJob::SumImage { field: q.to_string(), poly: poly.to_string(), set });
                }
            }
        }
    }
    for (mi, m) in [91u32, 143].into_iter().enumerate() {
        let mf = m as f64;
        let gamma = algebra::gamma(m as u64) as f64;
        let sizes = window_sizes(mf / gamma.sqrt(), mf, 8, role);
        for (si, &n) in sizes.iter().enumerate() {
            let seed = seed_base + (50_000 + mi * 100 + si) as u64;
            for set in [
                SetSpec::Interval { n },
                SetSpec::ArithProgression { start: 1 + si as i64, step: 3, n },
                SetSpec::Random { n, seed },
                SetSpec::Random { n, seed: seed + 7 },
            ] {
                jobs.push(CorpusJob::SumProductModular { modulus: m, set });
            }
        }
    }
    let dist_polys = ["x1^2 + x2^2", "x1^2 + 3*x2^2", "x1^2 + x1*x2 + x2^2", "x1^4 + x2^4"];
    for (qi, q) in [101u32, 199].into_iter().enumerate() {
        for (pi, poly) in dist_polys.iter().enumerate() {
            let k = if poly.contains('4') { 4 } else { 2 };
            let lo = (k * q) as f64;
            for (si, &n) in window_sizes(lo, 2.5 * lo, 3, role).iter().enumerate() {
                let seed = seed_base + (90_000 + qi * 1000 + pi * 100 + si) as u64;
                jobs.push(CorpusJob::Distance {
                    field: q.to_string(),
                    poly: poly.to_string(),
                    points: PointSetSpec::Random { n, seed },
                });
            }
        }
    }
    jobs
}

/// Calibrated delta for each inequality over the in-range members of a
/// corpus, with the checks themselves.
#[derive(Clone, Debug, Serialize)]
pub struct Calibration {
    pub sum_image: f64,
    pub sum_product_modular: f64,
    pub distance: f64,
    pub checks: Vec<(String, TheoremCheck)>,
}

impl Calibration {
    pub fn delta(&self, which: Inequality) -> f64 {
        match which {
            Inequality::SumImage => self.sum_image,
            Inequality::SumProductModular => self.sum_product_modular,
            Inequality::Distance => self.distance,
        }
    }
}

/// Run a corpus and calibrate each inequality on its in-range members.
pub fn calibrate_corpus(jobs: &[CorpusJob]) -> Result<Calibration> {
    let results = run_corpus(jobs);
    let mut checks = Vec::with_capacity(jobs.len());
    for (job, r) in jobs.iter().zip(results) {
        checks.push((job.to_string(), r?));
    }
    let delta = |which: Inequality| {
        let subset: Vec<TheoremCheck> = checks
            .iter()
            .filter(|(_, c)| c.inequality == which && c.regime == Regime::InRange)
            .map(|(_, c)| c.clone())
            .collect();
        calibrate_delta(&subset)
    };
    Ok(Calibration {
        sum_image: delta(Inequality::SumImage)?,
        sum_product_modular: delta(Inequality::SumProductModular)?,
        distance: delta(Inequality::Distance)?,
        checks,
    })
}

/// A random polynomial of total degree exactly `k` with `terms` monomials.
pub fn random_poly<R: Rng>(ctx: &RingCtx, k: u32, terms: usize, rng: &mut R) -> BiPoly {
    let q = ctx.order();
    let mut monos: Vec<(u32, u32)> = (0..=k).flat_map(|d| (0..=d).map(move |i| (i, d - i))).collect();
    let top = rng.gen_range(0..=k);
    let mut chosen = vec![((top, k - top), Elem(rng.gen_range(1..q)))];
    monos.retain(|&m| m != (top, k - top));
    for _ in 1..terms {
        if monos.is_empty() {
            break;
        }
        let m = monos.swap_remove(rng.gen_range(0..monos.len()));
        chosen.push((m, Elem(rng.gen_range(1..q))));
    }
    BiPoly::from_terms(ctx, chosen)
}

/// Fields of prime order used by [`polynomial_corpus`].
pub const CORPUS_PRIMES: [u32; 9] = [5, 7, 11, 13, 31, 61, 101, 151, 199];

/// Seeded random polynomials of degree 2 to 4 without a linear factor,
/// `per_field` of them over each field in [`CORPUS_PRIMES`].
pub fn polynomial_corpus(per_field: usize, seed: u64) -> Result<Vec<BiPoly>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for q in CORPUS_PRIMES {
        let ctx = RingCtx::prime_field(q)?;
        let mut found = 0;
        while found < per_field {
            let k = rng.gen_range(2..=4u32);
            let terms = rng.gen_range(2..=5usize);
            let p = random_poly(&ctx, k, terms, &mut rng);
            if p.degree() < q && p.has_linear_factor()?.is_none() {
                out.push(p);
                found += 1;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u32) -> RingCtx {
        RingCtx::parse_field(&q.to_string()).unwrap()
    }

    fn codes(v: &[Elem]) -> Vec<u32> {
        v.iter().map(|e| e.code()).collect()
    }

    #[test]
    fn set_spec_parsing() {
        assert_eq!(SetSpec::parse("interval:10", 0).unwrap(), SetSpec::Interval { n: 10 });
        assert_eq!(SetSpec::parse("random:20:seed=7", 0).unwrap(), SetSpec::Random { n: 20, seed: 7 });
        assert_eq!(SetSpec::parse("random:20", 9).unwrap(), SetSpec::Random { n: 20, seed: 9 });
        assert_eq!(
            SetSpec::parse("ap:3:2:4", 0).unwrap(),
            SetSpec::ArithProgression { start: 3, step: 2, n: 4 }
        );
        assert_eq!(SetSpec::parse("explicit:1,2,-3", 0).unwrap(), SetSpec::Explicit { values: vec![1, 2, -3] });
        assert!(SetSpec::parse("interval", 0).is_err());
        assert!(SetSpec::parse("blob:3", 0).is_err());
        for s in ["interval:10", "ap:3:2:4", "geometric:2:5", "random:20:seed=7", "subfield", "explicit:1,2"] {
            assert_eq!(SetSpec::parse(s, 0).unwrap().to_string(), s);
        }
        assert_eq!(
            PointSetSpec::parse("explicit:0,0;1,2", 0).unwrap(),
            PointSetSpec::Explicit { points: vec![(0, 0), (1, 2)] }
        );
        assert_eq!(
            PointSetSpec::parse("product:interval:3", 0).unwrap().to_string(),
            "product:interval:3"
        );
    }

    #[test]
    fn set_generation() {
        let ctx = f(101);
        assert_eq!(codes(&SetSpec::Interval { n: 3 }.generate(&ctx).unwrap()), vec![1, 2, 3]);
        assert_eq!(codes(&SetSpec::Geometric { ratio: 3, n: 4 }.generate(&ctx).unwrap()), vec![1, 3, 9, 27]);
        assert_eq!(
            codes(&SetSpec::ArithProgression { start: 100, step: 1, n: 3 }.generate(&ctx).unwrap()),
            vec![100, 0, 1]
        );
        let r = SetSpec::Random { n: 30, seed: 5 }.generate(&ctx).unwrap();
        assert_eq!(r.len(), 30);
        assert_eq!(r, SetSpec::Random { n: 30, seed: 5 }.generate(&ctx).unwrap());
        assert!(SetSpec::Random { n: 102, seed: 0 }.generate(&ctx).is_err());
        // 10 has order 4 modulo 101.
        assert!(SetSpec::Geometric { ratio: 10, n: 5 }.generate(&ctx).is_err());
        assert!(SetSpec::Explicit { values: vec![1, 102] }.generate(&ctx).is_err());
        assert!(SetSpec::Subfield.generate(&ctx).is_err());
        let f9 = RingCtx::parse_field("3^2").unwrap();
        assert_eq!(codes(&SetSpec::Subfield.generate(&f9).unwrap()), vec![0, 1, 2]);
        assert_eq!(PointSetSpec::Plane.generate(&RingCtx::prime_field(5).unwrap()).unwrap().len(), 25);
    }

    #[test]
    fn set_operation_examples() {
        let ctx = f(101);
        let a = SetSpec::Interval { n: 3 }.generate(&ctx).unwrap();
        assert_eq!(sumset(&ctx, &a).unwrap().len(), 5);
        let p1 = BiPoly::parse("2*x1 + 3*x2", &ctx).unwrap();
        assert_eq!(image_set(&p1, &a).unwrap().len(), 9);
        let one = [Elem(7)];
        assert_eq!(sumset(&ctx, &one).unwrap().len(), 1);
        assert_eq!(productset(&ctx, &one).unwrap().len(), 1);
        assert_eq!(image_set(&p1, &one).unwrap().len(), 1);
    }

    #[test]
    fn interval_image_under_linear_form_is_5n_minus_6() {
        let ctx = f(1009);
        let p1 = BiPoly::parse("2*x1 + 3*x2", &ctx).unwrap();
        for n in 3..=20usize {
            let a = SetSpec::Interval { n }.generate(&ctx).unwrap();
            // Values 2i + 3j, 1 <= i, j <= n: everything in [5, 5n] except 6 and 5n - 1.
            let brute: std::collections::BTreeSet<usize> =
                (1..=n).flat_map(|i| (1..=n).map(move |j| 2 * i + 3 * j)).collect();
            assert_eq!(image_set(&p1, &a).unwrap().len(), brute.len());
            assert_eq!(brute.len(), 5 * n - 6);
            assert!(!brute.contains(&6) && !brute.contains(&(5 * n - 1)));
        }
    }

    #[test]
    fn distance_set_examples() {
        let ctx = RingCtx::prime_field(5).unwrap();
        let p = BiPoly::parse("x1^2 + x2^2", &ctx).unwrap();
        let plane = PointSetSpec::Plane.generate(&ctx).unwrap();
        assert_eq!(distance_set(&p, &plane).unwrap().len(), 5);
        let two = [(Elem(0), Elem(0)), (Elem(1), Elem(3))];
        assert_eq!(codes(&distance_set(&p, &two).unwrap()), vec![0]);
        let lopsided = BiPoly::parse("x1", &ctx).unwrap();
        assert_eq!(codes(&distance_set(&lopsided, &two).unwrap()), vec![1, 4]);
    }

    #[test]
    fn sum_image_examples() {
        let ctx = f(101);
        let p = BiPoly::parse("x1*x2", &ctx).unwrap();
        let a = SetSpec::Interval { n: 10 }.generate(&ctx).unwrap();
        let c = theorem1_check(&p, &a).unwrap();
        let prod = productset(&ctx, &a).unwrap().len() as u64;
        assert_eq!(c.lhs, prod.max(19));
        assert_eq!(c.regime, Regime::OutOfRange);
        assert!(c.empirical_delta > 0.0);

        let single = theorem1_check(&p, &[Elem(4)]).unwrap();
        assert_eq!(single.lhs, 1);
        assert!(single.empirical_delta.is_finite());

        let f9 = RingCtx::parse_field("3^2").unwrap();
        let sub = SetSpec::Subfield.generate(&f9).unwrap();
        let c = theorem1_check(&BiPoly::parse("x1*x2", &f9).unwrap(), &sub).unwrap();
        assert_eq!(c.lhs, 3);
        assert_eq!(c.regime, Regime::OutOfRange);

        let deg = BiPoly::parse("(2*x1+3*x2)^2", &ctx).unwrap();
        assert_eq!(theorem1_check(&deg, &a), Err(Error::DegenerateInput));
    }

    #[test]
    fn modular_sum_product_examples() {
        let ctx = RingCtx::modular(91).unwrap();
        let a = SetSpec::Interval { n: 9 }.generate(&ctx).unwrap();
        let c = theorem2_check(&ctx, &a).unwrap();
        let expected = sumset(&ctx, &a).unwrap().len().max(productset(&ctx, &a).unwrap().len());
        assert_eq!(c.lhs, expected as u64);
        assert_eq!(c.regime, Regime::OutOfRange);

        let all: Vec<Elem> = ctx.elements().collect();
        let c = theorem2_check(&ctx, &all).unwrap();
        assert_eq!(c.lhs, 91);
        assert!(c.empirical_delta.is_finite() && c.empirical_delta > 0.0);

        let even = RingCtx::modular(60).unwrap();
        let c = theorem2_check(&even, &SetSpec::Interval { n: 50 }.generate(&even).unwrap()).unwrap();
        assert_eq!(c.regime, Regime::OutOfRange);
        assert!(c.note.unwrap().contains("even"));

        let p101 = RingCtx::modular(101).unwrap();
        let c = theorem2_check(&p101, &SetSpec::Random { n: 20, seed: 3 }.generate(&p101).unwrap()).unwrap();
        assert_eq!(c.set_size, 20);
    }

    #[test]
    fn distance_examples() {
        let ctx = RingCtx::prime_field(5).unwrap();
        let p = BiPoly::parse("x1^2 + x2^2", &ctx).unwrap();
        let plane = PointSetSpec::Plane.generate(&ctx).unwrap();
        let c = distance_check(&p, &plane).unwrap();
        assert_eq!(c.lhs, 5);
        assert!((c.rhs_at_delta_1 - (25.0 / (4.0 * 5f64.sqrt())).min(2.5)).abs() < 1e-12);
        assert_eq!(c.regime, Regime::InRange);

        let c = distance_check(&p, &[(Elem(1), Elem(1))]).unwrap();
        assert_eq!(c.lhs, 0);
        assert_eq!(c.empirical_delta, 0.0);

        let odd = BiPoly::parse("x1^3 + x2^2", &ctx).unwrap();
        assert_eq!(distance_check(&odd, &plane), Err(Error::NotSymmetric));
        let deg = BiPoly::parse("(x1 + x2)^2", &ctx).unwrap();
        assert_eq!(distance_check(&deg, &plane), Err(Error::DegenerateInput));
    }

    #[test]
    fn calibration_examples() {
        let mk = |d: f64, regime| TheoremCheck {
            inequality: Inequality::SumImage,
            set_size: 1,
            lhs: 1,
            rhs_at_delta_1: 1.0 / d,
            empirical_delta: d,
            regime,
            note: None,
        };
        assert_eq!(calibrate_delta(&[mk(0.7, Regime::InRange)]), Ok(0.7));
        assert_eq!(
            calibrate_delta(&[mk(0.9, Regime::InRange), mk(0.4, Regime::InRange), mk(1.3, Regime::InRange)]),
            Ok(0.4)
        );
        assert_eq!(calibrate_delta(&[]), Err(Error::EmptyCorpus));
        assert_eq!(
            calibrate_delta(&[mk(0.9, Regime::InRange), mk(0.4, Regime::OutOfRange)]),
            Err(Error::OutOfRegime(1))
        );
    }

    #[test]
    fn standard_corpora_are_disjoint_and_in_range() {
        let cal = standard_corpus(CorpusRole::Calibration);
        let held = standard_corpus(CorpusRole::HeldOut);
        assert!(cal.iter().all(|j| !held.contains(j)));
        for kind in [Inequality::SumImage, Inequality::SumProductModular, Inequality::Distance] {
            assert!(cal.iter().any(|j| j.inequality() == kind));
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(101), 2);
        assert_eq!(primitive_root(199), 3);
        assert_eq!(primitive_root(7), 3);
    }
}
