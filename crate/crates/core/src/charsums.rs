//! Exponential sums: quadratic Gauss sums and Kloosterman sums over Z_m,
//! root-set sums over the plane of a finite field, diagonalization of
//! binary quadratic forms over Z_m, and the check of the Z_m spectral bound
//! `lambda(G_a) <= g(m) m / gamma(m)^{1/2}`.

use serde::Serialize;

use crate::algebra::{self, gcd, mod_inverse, Elem, Point, RingCtx, UnitRoots};
use crate::bipoly::BiPoly;
use crate::cayley::{spectrum, CayleyDigraph, SpectrumMethod};
use crate::error::{ensure_cap, Error, Result};
use crate::par;

/// Absolute slack for bound comparisons.
pub const BOUND_TOLERANCE: f64 = 1e-6;

/// A computed sum with the bound it is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SumValue {
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
    pub bound: f64,
    /// `magnitude / bound`.
    pub ratio: f64,
}

impl SumValue {
    fn new(value: num_complex::Complex64, bound: f64) -> Self {
        let magnitude = value.norm();
        SumValue {
            re: value.re,
            im: value.im,
            magnitude,
            bound,
            ratio: if bound > 0.0 { magnitude / bound } else { f64::INFINITY },
        }
    }

    pub fn within_bound(&self) -> bool {
        self.magnitude <= self.bound + BOUND_TOLERANCE
    }
}

fn require_odd(m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidRing("modulus must be positive".into()));
    }
    if m.is_multiple_of(2) {
        return Err(Error::EvenModulus(m as u64));
    }
    Ok(())
}

/// `sum_{y in Z_m} e(z y^2 / m)` for odd `m` and a unit `z`. Its magnitude
/// is exactly `sqrt(m)`, which is reported as the bound.
pub fn gauss_sum(m: u32, z: u32) -> Result<SumValue> {
    require_odd(m)?;
    if gcd(z as u64, m as u64) != 1 {
        return Err(Error::NotAUnit(z as u64));
    }
    let roots = UnitRoots::new(m);
    let m64 = m as u64;
    let z = z as u64 % m64;
    let value = (0..m64).map(|y| roots.get((z * (y * y % m64) % m64) as u32)).sum();
    Ok(SumValue::new(value, (m as f64).sqrt()))
}

/// Kloosterman bound `tau(m) gcd(a, b, m)^{1/2} sqrt(m)`.
pub fn kloosterman_bound(m: u32, a: u32, b: u32) -> f64 {
    let g = gcd(gcd(a as u64, b as u64), m as u64);
    algebra::tau(m as u64) as f64 * (g as f64).sqrt() * (m as f64).sqrt()
}

/// Units of Z_m paired with their inverses.
fn units_with_inverses(m: u32) -> Vec<(u64, u64)> {
    (0..m as u64)
        .filter_map(|y| mod_inverse(y, m as u64).map(|inv| (y, inv)))
        .collect()
}

fn kloosterman_with(m: u32, a: u32, b: u32, units: &[(u64, u64)], roots: &UnitRoots) -> Result<SumValue> {
    let m64 = m as u64;
    let (a, b) = (a as u64 % m64, b as u64 % m64);
    let value = units
        .iter()
        .map(|&(y, inv)| roots.get(((a * y + b * inv) % m64) as u32))
        .sum();
    let s = SumValue::new(value, kloosterman_bound(m, a as u32, b as u32));
    if !s.within_bound() {
        return Err(Error::TheoremViolation(format!(
            "|K({a}, {b}; {m})| = {} exceeds {}",
            s.magnitude, s.bound
        )));
    }
    Ok(s)
}

/// `sum_{y in Z_m^*} e((a y + b y^{-1}) / m)` for odd `m`, checked against
/// [`kloosterman_bound`].
pub fn kloosterman(m: u32, a: u32, b: u32) -> Result<SumValue> {
    require_odd(m)?;
    kloosterman_with(m, a, b, &units_with_inverses(m), &UnitRoots::new(m))
}

/// Kloosterman sums for every `(a, b)` in `Z_m^2`, row-major in `a`.
pub fn kloosterman_all(m: u32) -> Result<Vec<SumValue>> {
    require_odd(m)?;
    let units = units_with_inverses(m);
    let roots = UnitRoots::new(m);
    let rows: Vec<Result<Vec<SumValue>>> = par::map_range(m as usize, |a| {
        (0..m).map(|b| kloosterman_with(m, a as u32, b, &units, &roots)).collect()
    });
    Ok(rows.into_iter().collect::<Result<Vec<_>>>()?.concat())
}

/// `sum_{x in Root(P)} chi_y(x)` over a field, compared with `k^2 sqrt(q)`.
pub fn weil_sum(p: &BiPoly, y: Point) -> Result<SumValue> {
    Ok(weil_sums(p, &[y])?.remove(0))
}

/// [`weil_sum`] at several frequencies, sharing the root set.
pub fn weil_sums(p: &BiPoly, ys: &[Point]) -> Result<Vec<SumValue>> {
    let ctx = p.ctx();
    if p.has_linear_factor()?.is_some() {
        return Err(Error::LinearFactorPresent);
    }
    if ys.iter().any(|y| y.0.is_zero() && y.1.is_zero()) {
        return Err(Error::ZeroFrequency);
    }
    let roots = UnitRoots::new(ctx.characteristic());
    let zeros = p.root_set()?;
    let bound = weil_bound(p);
    Ok(par::map_slice(ys, |&y| {
        SumValue::new(zeros.iter().map(|&x| roots.get(ctx.pairing(y, x))).sum(), bound)
    }))
}

/// `k^2 sqrt(q)`.
pub fn weil_bound(p: &BiPoly) -> f64 {
    let k = p.degree() as f64;
    k * k * (p.ctx().order() as f64).sqrt()
}

/// Largest root-set sum over all nonzero frequencies.
#[derive(Clone, Debug, Serialize)]
pub struct WeilProfile {
    pub degree: u32,
    pub q: u32,
    pub roots: usize,
    pub max_magnitude: f64,
    pub argmax: Point,
    pub bound: f64,
    pub ratio: f64,
}

/// `max_{y != 0} |sum_{x in Root(P)} chi_y(x)|`, through the spectrum of the
/// Cayley graph generated by `Root(P)`.
pub fn weil_profile(p: &BiPoly) -> Result<WeilProfile> {
    if p.has_linear_factor()?.is_some() {
        return Err(Error::LinearFactorPresent);
    }
    let g = CayleyDigraph::from_level(p, Elem::ZERO)?;
    let s = spectrum(&g, SpectrumMethod::Transform)?;
    let bound = weil_bound(p);
    Ok(WeilProfile {
        degree: p.degree(),
        q: p.ctx().order(),
        roots: g.degree(),
        max_magnitude: s.lambda,
        argmax: g.point(s.lambda_at),
        bound,
        ratio: s.lambda / bound,
    })
}

/// Change of variables `u = t00 x + t01 y`, `v = t10 x + t11 y` with
/// `Q(x, y) = a1 u^2 + a2 v^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Diagonalization {
    pub a1: u32,
    pub a2: u32,
    pub basis: [[u32; 2]; 2],
}

/// `a x^2 + b x y + c y^2` over Z_m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticForm {
    pub m: u32,
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub diag: Option<Diagonalization>,
}

impl QuadraticForm {
    pub fn new(m: u32, a: i64, b: i64, c: i64) -> Self {
        let r = |v: i64| v.rem_euclid(m as i64) as u32;
        QuadraticForm { m, a: r(a), b: r(b), c: r(c), diag: None }
    }

    pub fn sum_of_squares(m: u32) -> Self {
        Self::new(m, 1, 0, 1)
    }

    pub fn hyperbolic(m: u32) -> Self {
        Self::new(m, 0, 2, 0)
    }

    pub fn eval(&self, x: u32, y: u32) -> u32 {
        let m = self.m as u64;
        let (x, y) = (x as u64 % m, y as u64 % m);
        ((self.a as u64 * (x * x % m) + self.b as u64 * (x * y % m) + self.c as u64 * (y * y % m)) % m) as u32
    }

    /// Find units `a1, a2` and an invertible change of variables with
    /// `Q = a1 u^2 + a2 v^2`. Pivots on `a`, then on `c`, then (when `b` is a
    /// unit) on the `y^2` coefficient after `x -> x + y`.
    pub fn diagonalize(&self) -> Result<QuadraticForm> {
        require_odd(self.m)?;
        let m = self.m as u64;
        let unit = |v: u64| gcd(v % m, m) == 1;
        let inv = |v: u64| mod_inverse(v % m, m).expect("unit");
        let (a, b, c) = (self.a as u64, self.b as u64, self.c as u64);
        let md = |v: i128| v.rem_euclid(m as i128) as u64;

        // Returns (a1, a2, basis) for a form with unit x^2 coefficient `p`,
        // cross term `b` and other square coefficient `o`, in variables (s, t):
        // p s^2 + b s t + o t^2 = p (s + b/(2p) t)^2 + (o - b^2/(4p)) t^2.
        let complete = |p: u64, b: u64, o: u64| -> (u64, u64, u64) {
            let h = b * inv(2 * p) % m;
            let a2 = md(o as i128 - (b as i128 * b as i128 % m as i128) * inv(4 * p) as i128);
            (p, a2, h)
        };

        let (a1, a2, basis) = if unit(a) {
            let (a1, a2, h) = complete(a, b, c);
            (a1, a2, [[1, h], [0, 1]])
        } else if unit(c) {
            let (a1, a2, h) = complete(c, b, a);
            (a1, a2, [[h, 1], [1, 0]])
        } else if unit(b) {
            // Q(x' + y', y') = a x'^2 + (2a + b) x'y' + (a + b + c) y'^2, x' = x - y.
            let (b2, c2) = ((2 * a + b) % m, (a + b + c) % m);
            if !unit(c2) {
                return Err(Error::NotInOmega);
            }
            let (a1, a2, h) = complete(c2, b2, a);
            // u = y' + h x' = h x + (1 - h) y, v = x' = x - y.
            (a1, a2, [[h, md(1 - h as i128)], [1, m - 1]])
        } else {
            return Err(Error::NotInOmega);
        };
        if !unit(a1) || !unit(a2) {
            return Err(Error::NotInOmega);
        }
        let diag = Diagonalization {
            a1: a1 as u32,
            a2: a2 as u32,
            basis: [[basis[0][0] as u32, basis[0][1] as u32], [basis[1][0] as u32, basis[1][1] as u32]],
        };
        self.verify(&diag)?;
        Ok(QuadraticForm { diag: Some(diag), ..*self })
    }

    /// Expand `a1 u^2 + a2 v^2` back in `x, y` and compare coefficients;
    /// also require an invertible change of variables.
    fn verify(&self, d: &Diagonalization) -> Result<()> {
        let m = self.m as u64;
        let [[t00, t01], [t10, t11]] = d.basis.map(|r| r.map(|v| v as u64));
        let (a1, a2) = (d.a1 as u64, d.a2 as u64);
        let x2 = (a1 * t00 % m * t00 + a2 * t10 % m * t10) % m;
        let xy = 2 * (a1 * t00 % m * t01 + a2 * t10 % m * t11) % m;
        let y2 = (a1 * t01 % m * t01 + a2 * t11 % m * t11) % m;
        let det = (t00 * t11 % m + m - t01 * t10 % m) % m;
        if (x2, xy, y2) != (self.a as u64, self.b as u64, self.c as u64) || gcd(det, m) != 1 {
            return Err(Error::InvariantViolated(format!("diagonalization {d:?} does not reproduce {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Gap2Row {
    pub a: u32,
    pub degree: usize,
    pub lambda: f64,
    pub bound: f64,
    pub ratio: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Gap2Report {
    pub form: QuadraticForm,
    pub m: u32,
    pub g: u64,
    pub gamma: u64,
    /// `g(m) m / gamma(m)^{1/2}`.
    pub bound: f64,
    pub rows: Vec<Gap2Row>,
    pub all_hold: bool,
    pub max_ratio: f64,
}

/// For every `a != 0` in Z_m, compute `lambda(G_a)` for the level set
/// `Q = a` in Z_m^2 and compare with `g(m) m / gamma(m)^{1/2}`.
pub fn gap2_check(form: &QuadraticForm) -> Result<Gap2Report> {
    let form = form.diagonalize()?;
    let m = form.m;
    ensure_cap("Z_m^2", m as u64 * m as u64, crate::cayley::MAX_VERTICES)?;
    let af = algebra::arith_functions(m as u64);
    let bound = af.g as f64 * m as f64 / (af.gamma as f64).sqrt();
    let rows: Vec<Gap2Row> = if m == 1 {
        Vec::new()
    } else {
        let ctx = RingCtx::modular(m)?;
        let table: Vec<Elem> = (0..m * m).map(|idx| Elem(form.eval(idx / m, idx % m))).collect();
        let rows: Vec<Result<Gap2Row>> = par::map_range(m as usize - 1, |i| {
            let a = i as u32 + 1;
            let g = CayleyDigraph::from_value_table(&ctx, &table, Elem(a))?;
            let s = spectrum(&g, SpectrumMethod::Transform)?;
            Ok(Gap2Row {
                a,
                degree: s.degree,
                lambda: s.lambda,
                bound,
                ratio: s.lambda / bound,
                holds: s.lambda <= bound + BOUND_TOLERANCE,
            })
        });
        rows.into_iter().collect::<Result<_>>()?
    };
    let all_hold = rows.iter().all(|r| r.holds);
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(Gap2Report { form, m, g: af.g, gamma: af.gamma, bound, rows, all_hold, max_ratio })
}
