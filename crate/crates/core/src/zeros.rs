//! Zero sets of polynomials: Aberth–Ehrlich root finding, argument-principle
//! certification, and the monic witness `p_W`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{FactoredPolynomial, Polynomial};

/// Roots closer than this are always merged.
pub const CLUSTER_RADIUS: f64 = 1e-8;
/// Roots closer than this are merged when their centroid is a root to
/// working precision.
pub const TIE_BREAK_RADIUS: f64 = 1e-6;
/// Width of the annulus around `|z| = s` that blocks certification.
pub const BOUNDARY_GAP: f64 = 1e-6;
pub const MAX_SWEEPS: usize = 500;

const EPS: f64 = f64::EPSILON;

/// Distinct roots with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Roots {
    pub roots: Vec<(Complex64, usize)>,
    /// Largest `|f(z)|` over the simple roots.
    pub residual: f64,
    pub sweeps: usize,
}

impl Roots {
    /// Roots repeated by multiplicity.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|&(z, m)| std::iter::repeat_n(z, m))
            .collect()
    }
}

/// `Z_s(f)`: zeros with `0 < |z| < s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroMultiset {
    pub radius: f64,
    pub zeros: Vec<(Complex64, usize)>,
    pub certified: bool,
    pub residual: f64,
}

impl ZeroMultiset {
    pub fn len(&self) -> usize {
        self.zeros.iter().map(|(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn expanded(&self) -> Vec<Complex64> {
        self.zeros
            .iter()
            .flat_map(|&(z, m)| std::iter::repeat_n(z, m))
            .collect()
    }

    pub fn all_simple(&self) -> bool {
        self.zeros.iter().all(|&(_, m)| m == 1)
    }
}

#[derive(Serialize, Deserialize)]
struct ZeroMultisetJson {
    radius: f64,
    certified: bool,
    zeros: Vec<[f64; 3]>,
    residual: f64,
}

impl Serialize for ZeroMultiset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ZeroMultisetJson {
            radius: self.radius,
            certified: self.certified,
            zeros: self.zeros.iter().map(|(z, m)| [z.re, z.im, *m as f64]).collect(),
            residual: self.residual,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ZeroMultiset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ZeroMultisetJson::deserialize(d)?;
        Ok(Self {
            radius: j.radius,
            certified: j.certified,
            zeros: j
                .zeros
                .into_iter()
                .map(|[re, im, m]| (Complex64::new(re, im), m as usize))
                .collect(),
            residual: j.residual,
        })
    }
}

/// `f(z)/f'(z)` together with `|f(z)|` and the roundoff scale
/// `Σ|c_k||z|^k`. Outside the unit disk the reversed polynomial is used.
fn newton_ratio(c: &[Complex64], abs_c: &[f64], z: Complex64) -> (Complex64, f64, f64) {
    let n = c.len() - 1;
    let zero = Complex64::new(0.0, 0.0);
    if z.norm() <= 1.0 {
        let (mut p, mut dp, mut scale) = (zero, zero, 0.0);
        let az = z.norm();
        for k in (0..=n).rev() {
            dp = dp * z + p;
            p = p * z + c[k];
            scale = scale * az + abs_c[k];
        }
        (p / dp, p.norm(), scale)
    } else {
        // q(w) = wⁿ f(1/w); f'/f = w (n - w q'/q)
        let w = z.inv();
        let aw = w.norm();
        let (mut q, mut dq, mut scale) = (zero, zero, 0.0);
        for k in 0..=n {
            dq = dq * w + q;
            q = q * w + c[k];
            scale = scale * aw + abs_c[k];
        }
        let denom = w * (n as f64 - w * dq / q);
        // |f(z)| = |q(w)|·|z|ⁿ; compare in the reversed scale
        (denom.inv(), q.norm(), scale)
    }
}

/// Starting points on the circles of the Newton polygon of `|c_k|`.
fn initial_guesses(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let pts: Vec<(usize, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > 0.0)
        .map(|(k, v)| (k, v.norm().ln()))
        .collect();
    // upper convex hull
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut out = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let ((i, li), (j, lj)) = (w[0], w[1]);
        let m = j - i;
        let u = ((li - lj) / m as f64).exp();
        for l in 0..m {
            let theta = TAU * l as f64 / m as f64 + TAU * i as f64 / n as f64 + 0.4;
            out.push(Complex64::from_polar(u, theta));
        }
    }
    out
}

/// Aberth–Ehrlich iteration for all roots of `c` (`c_0 ≠ 0`, degree ≥ 1).
fn aberth(c: &[Complex64]) -> Result<(Vec<Complex64>, usize)> {
    let n = c.len() - 1;
    let abs_c: Vec<f64> = c.iter().map(|v| v.norm()).collect();
    let mut z = initial_guesses(c);
    let mut frozen = vec![false; n];
    for sweep in 1..=MAX_SWEEPS {
        for i in 0..n {
            if frozen[i] {
                continue;
            }
            let (ratio, value, scale) = newton_ratio(c, &abs_c, z[i]);
            if value <= 4.0 * (n as f64 + 1.0) * EPS * scale {
                frozen[i] = true;
                continue;
            }
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    sum += (z[i] - z[j]).inv();
                }
            }
            let step = ratio / (1.0 - ratio * sum);
            if !step.is_finite() {
                // coincident iterates; nudge apart
                let nudge = Complex64::from_polar(1e-6 * (1.0 + z[i].norm()), 1.0 + i as f64);
                z[i] += nudge;
                continue;
            }
            z[i] -= step;
            if step.norm() <= 2.0 * EPS * z[i].norm() {
                frozen[i] = true;
            }
        }
        if frozen.iter().all(|&f| f) {
            return Ok((z, sweep));
        }
    }
    Err(Error::NoConvergence { sweeps: MAX_SWEEPS })
}

fn value_and_scale(c: &[Complex64], z: Complex64) -> (Complex64, f64) {
    let az = z.norm();
    let mut p = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for v in c.iter().rev() {
        p = p * z + v;
        scale = scale * az + v.norm();
    }
    (p, scale)
}

/// Groups iterates into clusters: within [`CLUSTER_RADIUS`] always, within
/// [`TIE_BREAK_RADIUS`] when the centroid residual is at roundoff level.
fn cluster(c: &[Complex64], z: &[Complex64]) -> Vec<(Complex64, usize)> {
    let n = z.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    let roundoff = |w: Complex64| {
        let (v, scale) = value_and_scale(c, w);
        v.norm() <= 64.0 * c.len() as f64 * EPS * scale
    };
    for i in 0..n {
        for j in i + 1..n {
            let d = (z[i] - z[j]).norm();
            if d > TIE_BREAK_RADIUS {
                continue;
            }
            if d <= CLUSTER_RADIUS || roundoff(0.5 * (z[i] + z[j])) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<(usize, Complex64, usize)> = Vec::new();
    for (i, &w) in z.iter().enumerate().take(n) {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += w;
                g.2 += 1;
            }
            None => groups.push((r, w, 1)),
        }
    }
    groups.into_iter().map(|(_, s, m)| (s / m as f64, m)).collect()
}

/// Newton steps on a simple root while they reduce the residual and stay
/// well inside the gap to its neighbours.
fn polish(c: &[Complex64], z: Complex64, gap: f64) -> Complex64 {
    let mut z = z;
    let (mut v, _) = value_and_scale(c, z);
    for _ in 0..3 {
        let poly_dp = c
            .iter()
            .enumerate()
            .rev()
            .take(c.len() - 1)
            .fold(Complex64::new(0.0, 0.0), |acc, (k, ck)| acc * z + ck * k as f64);
        let step = v / poly_dp;
        if !step.is_finite() || step.norm() > 0.1 * gap {
            break;
        }
        let cand = z - step;
        let (vc, _) = value_and_scale(c, cand);
        if vc.norm() >= v.norm() {
            break;
        }
        z = cand;
        v = vc;
    }
    z
}

/// Newton on the `(m-1)`-th derivative, where a root of multiplicity `m`
/// is simple.
fn refine_multiple(c: &[Complex64], z: Complex64, m: usize) -> Complex64 {
    let mut d = c.to_vec();
    for _ in 0..m - 1 {
        d = d.iter().enumerate().skip(1).map(|(k, v)| v * k as f64).collect();
    }
    let mut z = z;
    let (mut v, _) = value_and_scale(&d, z);
    for _ in 0..5 {
        let dd: Vec<Complex64> = d.iter().enumerate().skip(1).map(|(k, v)| v * k as f64).collect();
        let (slope, _) = value_and_scale(&dd, z);
        let step = v / slope;
        if !step.is_finite() || step.norm() > TIE_BREAK_RADIUS {
            break;
        }
        let cand = z - step;
        let (vc, _) = value_and_scale(&d, cand);
        if vc.norm() >= v.norm() {
            break;
        }
        z = cand;
        v = vc;
    }
    z
}

/// All roots of `f` with multiplicities.
pub fn find_roots(f: &Polynomial) -> Result<Roots> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial { what: "find_roots" });
    }
    let m0 = f.origin_multiplicity();
    let c = &f.coeffs()[m0..];
    let (mut roots, sweeps) = match c.len() - 1 {
        0 => (Vec::new(), 0),
        1 => (vec![(-c[0] / c[1], 1)], 0),
        _ => {
            let (z, sweeps) = aberth(c)?;
            (cluster(c, &z), sweeps)
        }
    };
    let centres: Vec<Complex64> = roots.iter().map(|r| r.0).collect();
    let mut residual: f64 = 0.0;
    for (i, (z, m)) in roots.iter_mut().enumerate() {
        if *m != 1 {
            *z = refine_multiple(c, *z, *m);
            continue;
        }
        let gap = centres
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, w)| (*z - w).norm())
            .fold(f64::INFINITY, f64::min);
        *z = polish(c, *z, gap.min(1.0 + z.norm()));
        residual = residual.max(f.eval(*z).norm());
    }
    if m0 > 0 {
        roots.push((Complex64::new(0.0, 0.0), m0));
    }
    Ok(Roots { roots, residual, sweeps })
}

const MAX_PHASE_STEP: f64 = PI / 4.0;
const MAX_REFINE_DEPTH: usize = 40;

/// Phase change of `f` along the arc `[a, b]` of `|z| = r`, subdividing
/// until every step turns by less than [`MAX_PHASE_STEP`].
fn arc_phase(
    f: &Polynomial,
    r: f64,
    (a, fa): (f64, Complex64),
    (b, fb): (f64, Complex64),
    depth: usize,
) -> Option<f64> {
    if fa.norm() == 0.0 || fb.norm() == 0.0 {
        return None;
    }
    let d = (fb / fa).arg();
    if d.abs() < MAX_PHASE_STEP {
        return Some(d);
    }
    if depth >= MAX_REFINE_DEPTH {
        return None;
    }
    let m = 0.5 * (a + b);
    let fm = f.eval(Complex64::from_polar(r, m));
    Some(arc_phase(f, r, (a, fa), (m, fm), depth + 1)? + arc_phase(f, r, (m, fm), (b, fb), depth + 1)?)
}

/// Winding number of `f` on `|z| = r`; `None` when the phase cannot be
/// tracked (a root on or extremely near the circle).
pub fn winding_number(f: &Polynomial, r: f64) -> Option<usize> {
    if f.is_zero() {
        return None;
    }
    if f.degree() == 0 {
        return Some(0);
    }
    let m = (4 * f.degree()).max(64).next_power_of_two();
    let vals = f.circle_values(r, m);
    let angle = |k: usize| TAU * k as f64 / m as f64;
    let mut total = 0.0;
    for k in 0..m {
        let next = (k + 1) % m;
        total += arc_phase(f, r, (angle(k), vals[k]), (angle(k) + TAU / m as f64, vals[next]), 0)?;
    }
    let turns = total / TAU;
    let rounded = turns.round();
    ((turns - rounded).abs() < 0.25 && rounded >= 0.0).then_some(rounded as usize)
}

/// Zeros in `|z| < s` counted with multiplicity, by the argument principle.
/// Fails when a zero lies within [`BOUNDARY_GAP`] of the circle.
pub fn count_zeros_disk(f: &Polynomial, s: f64) -> Result<usize> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial { what: "count_zeros_disk" });
    }
    let near = || Error::RootNearCircle { radius: s, tolerance: BOUNDARY_GAP };
    let inner = (s - BOUNDARY_GAP).max(0.5 * s);
    let lo = winding_number(f, inner).ok_or_else(near)?;
    let hi = winding_number(f, s + BOUNDARY_GAP).ok_or_else(near)?;
    if lo != hi {
        return Err(near());
    }
    Ok(lo)
}

/// `Z_s(f)` from the full root set, certified by the argument principle.
pub fn zero_multiset(f: &Polynomial, s: f64) -> Result<ZeroMultiset> {
    let roots = find_roots(f)?;
    let m0 = f.origin_multiplicity();
    let zeros: Vec<(Complex64, usize)> = roots
        .roots
        .iter()
        .copied()
        .filter(|(z, _)| z.norm() > 0.0 && z.norm() < s)
        .collect();
    let boundary = roots.roots.iter().any(|(z, _)| (z.norm() - s).abs() < BOUNDARY_GAP);
    let inside: usize = zeros.iter().map(|(_, m)| m).sum();
    let certified = if s.is_finite() {
        !boundary && count_zeros_disk(f, s).is_ok_and(|n| n == inside + m0)
    } else {
        inside + m0 == f.degree()
    };
    Ok(ZeroMultiset { radius: s, zeros, certified, residual: roots.residual })
}

/// Degrees up to this go straight to the full solver.
const FAST_PATH_MIN_DEGREE: usize = 48;
const FAST_PATH_SWEEPS: usize = 100;

/// `Z_s(f)` without solving for the zeros outside the disk.
///
/// The argument principle gives the count `K` inside `|z| < s`. Contour
/// power sums `Σ z_j^k` (Delves–Lyness) and Newton's identities give starting
/// points, refined by Aberth iteration on those `K` points only. Converged
/// iterates are genuine, distinct zeros, so `K` of them inside the disk is
/// all of them. Falls back to [`zero_multiset`] otherwise.
pub fn inner_zero_multiset(f: &Polynomial, s: f64) -> Result<ZeroMultiset> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial { what: "inner_zero_multiset" });
    }
    if f.degree() < FAST_PATH_MIN_DEGREE || !s.is_finite() {
        return zero_multiset(f, s);
    }
    let total = match count_zeros_disk(f, s) {
        Ok(n) => n,
        Err(_) => return zero_multiset(f, s),
    };
    let m0 = f.origin_multiplicity();
    let k = total - m0;
    if k == 0 {
        return Ok(ZeroMultiset { radius: s, zeros: Vec::new(), certified: true, residual: 0.0 });
    }
    let g = Polynomial::new(f.coeffs()[m0..].to_vec());
    let found = contour_starts(&g, s, k).and_then(|starts| restricted_aberth(g.coeffs(), s, starts));
    if let Some(inside) = found {
        let inside: Vec<Complex64> = inside.into_iter().filter(|z| z.norm() < s).collect();
        if inside.len() == k && cluster(g.coeffs(), &inside).len() == k {
            let residual = inside.iter().map(|z| f.eval(*z).norm()).fold(0.0, f64::max);
            let zeros = inside.into_iter().map(|z| (z, 1)).collect();
            return Ok(ZeroMultiset { radius: s, zeros, certified: true, residual });
        }
    }
    zero_multiset(f, s)
}

/// Approximate zeros inside `|z| < s` from the contour power sums of
/// `g'/g`, given their count `k`.
fn contour_starts(g: &Polynomial, s: f64, k: usize) -> Option<Vec<Complex64>> {
    let m = (8 * g.degree()).max(256).next_power_of_two();
    let dg = Polynomial::new(
        g.coeffs().iter().enumerate().skip(1).map(|(j, c)| c * j as f64).collect(),
    );
    let vals = g.circle_values(s, m);
    let dvals = dg.circle_values(s, m);
    // with w = z/s: p_j = (1/m) Σ_l w_l^j · z_l g'(z_l)/g(z_l)
    let base: Vec<Complex64> = (0..m)
        .map(|l| Complex64::from_polar(s, TAU * l as f64 / m as f64) * dvals[l] / vals[l])
        .collect();
    let mut power = vec![Complex64::new(0.0, 0.0); k + 1];
    for (l, b) in base.iter().enumerate() {
        let w = Complex64::from_polar(1.0, TAU * l as f64 / m as f64);
        let mut wj = Complex64::new(1.0, 0.0);
        for p in power.iter_mut().skip(1) {
            wj *= w;
            *p += wj * b;
        }
    }
    for p in power.iter_mut() {
        *p /= m as f64;
    }
    // Newton's identities: j e_j = Σ_{i=1..j} (-1)^{i-1} e_{j-i} p_i
    let mut e = vec![Complex64::new(1.0, 0.0); k + 1];
    for j in 1..=k {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 1..=j {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += e[j - i] * power[i] * sign;
        }
        e[j] = acc / j as f64;
    }
    // monic polynomial Σ (-1)^j e_j w^{k-j}, ascending order
    let coeffs: Vec<Complex64> = (0..=k)
        .rev()
        .map(|j| if j % 2 == 0 { e[j] } else { -e[j] })
        .collect();
    if coeffs.iter().any(|c| !c.is_finite()) {
        return None;
    }
    let w = find_roots(&Polynomial::new(coeffs)).ok()?;
    Some(w.expanded().into_iter().map(|w| w * s).collect())
}

/// Aberth iteration on the given starting points only. Returns `None` when
/// an iterate escapes `|z| < 4s` or the sweeps run out.
fn restricted_aberth(c: &[Complex64], s: f64, mut z: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = c.len() - 1;
    let count = z.len();
    let abs_c: Vec<f64> = c.iter().map(|v| v.norm()).collect();
    let mut frozen = vec![false; count];
    for _ in 0..FAST_PATH_SWEEPS {
        for i in 0..count {
            if frozen[i] {
                continue;
            }
            let (ratio, value, scale) = newton_ratio(c, &abs_c, z[i]);
            if value <= 4.0 * (n as f64 + 1.0) * EPS * scale {
                frozen[i] = true;
                continue;
            }
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..count {
                if j != i {
                    sum += (z[i] - z[j]).inv();
                }
            }
            let step = ratio / (1.0 - ratio * sum);
            if !step.is_finite() {
                return None;
            }
            z[i] -= step;
            if z[i].norm() > 4.0 * s {
                return None;
            }
            if step.norm() <= 2.0 * EPS * z[i].norm() {
                frozen[i] = true;
            }
        }
        if frozen.iter().all(|&f| f) {
            return Some(z);
        }
    }
    None
}

/// `p_W(z) = Π_{w∈W} (z - w)`.
pub fn monic_from_zeros(w: &ZeroMultiset) -> Polynomial {
    monic_from_roots(&w.expanded())
}

pub fn monic_from_roots(roots: &[Complex64]) -> Polynomial {
    FactoredPolynomial { lead: Complex64::new(1.0, 0.0), roots: roots.to_vec() }.expand()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::CoefficientSequence;
    use crate::gaf::sample_gaf;
    use crate::rng::{complex_gaussian, tagged_stream};
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Eigenvalues of the companion matrix.
    fn companion_roots(f: &Polynomial) -> Vec<Complex64> {
        let co = f.coeffs();
        let n = co.len() - 1;
        let lead = co[n];
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == 0 {
                -co[n - 1 - j] / lead
            } else if i == j + 1 {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        nalgebra::linalg::Schur::new(m).eigenvalues().unwrap().iter().copied().collect()
    }

    fn max_matching_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
        assert_eq!(a.len(), b.len());
        let mut used = vec![false; b.len()];
        let mut worst: f64 = 0.0;
        for z in a {
            let (j, d) = b
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, w)| (j, (z - w).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            used[j] = true;
            worst = worst.max(d);
        }
        worst
    }

    #[test]
    fn find_roots_examples() {
        let r = find_roots(&Polynomial::from_real(&[-0.25, 0.0, 1.0])).unwrap();
        let mut got = r.expanded();
        got.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((got[0] - c(-0.5, 0.0)).norm() < 1e-14);
        assert!((got[1] - c(0.5, 0.0)).norm() < 1e-14);
        assert!(r.roots.iter().all(|&(_, m)| m == 1));

        let f = monic_from_roots(&[c(0.3, 0.0), c(0.3, 0.0), c(-0.4, 0.0)]);
        let r = find_roots(&f).unwrap();
        assert_eq!(r.roots.len(), 2);
        let double = r.roots.iter().find(|x| x.1 == 2).unwrap();
        assert!((double.0 - c(0.3, 0.0)).norm() < 1e-10, "{double:?}");
        let single = r.roots.iter().find(|x| x.1 == 1).unwrap();
        assert!((single.0 - c(-0.4, 0.0)).norm() < 1e-12);
        assert!(find_roots(&Polynomial::new(vec![])).is_err());
    }

    #[test]
    fn companion_oracle_degree_20() {
        let mut rng = tagged_stream(1, 20, 0);
        for _ in 0..20 {
            let f = Polynomial::new((0..=20).map(|_| complex_gaussian(&mut rng)).collect());
            let ours = find_roots(&f).unwrap().expanded();
            let oracle = companion_roots(&f);
            assert!(max_matching_distance(&ours, &oracle) < 1e-9);
        }
    }

    #[test]
    fn count_examples() {
        let f = Polynomial::from_real(&[-0.25, 0.0, 1.0]);
        assert_eq!(count_zeros_disk(&f, 1.0).unwrap(), 2);
        assert_eq!(count_zeros_disk(&f, 0.4).unwrap(), 0);
        let cube = Polynomial::from_real(&[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(count_zeros_disk(&cube, 0.5).unwrap(), 3);
        assert!(matches!(count_zeros_disk(&f, 0.5), Err(Error::RootNearCircle { .. })));
        assert!(matches!(count_zeros_disk(&f, 0.5 + 5e-7), Err(Error::RootNearCircle { .. })));
    }

    #[test]
    fn zero_multiset_examples() {
        let z = zero_multiset(&Polynomial::from_real(&[-0.25, 0.0, 1.0]), 1.0).unwrap();
        assert_eq!(z.len(), 2);
        assert!(z.certified);
        let z = zero_multiset(&Polynomial::from_real(&[0.0, -0.5, 1.0]), 1.0).unwrap();
        assert_eq!(z.zeros.len(), 1);
        assert!((z.zeros[0].0 - c(0.5, 0.0)).norm() < 1e-14);
        assert!(z.certified);
        let z = zero_multiset(&Polynomial::from_real(&[-2.0, 1.0]), 1.0).unwrap();
        assert!(z.is_empty() && z.certified);
        let z = zero_multiset(&Polynomial::from_real(&[-0.5, 1.0]), 0.5 + 1e-7).unwrap();
        assert!(!z.certified);
        let json = serde_json::to_string(&z).unwrap();
        assert_eq!(serde_json::from_str::<ZeroMultiset>(&json).unwrap(), z);
    }

    #[test]
    fn monic_examples() {
        let w = ZeroMultiset {
            radius: 1.0,
            zeros: vec![(c(0.5, 0.0), 1), (c(-0.5, 0.0), 1)],
            certified: true,
            residual: 0.0,
        };
        let p = monic_from_zeros(&w);
        let expect = [c(-0.25, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert!(p.coeffs().iter().zip(expect).all(|(a, b)| (a - b).norm() < 1e-15));
        let empty = ZeroMultiset { zeros: vec![], ..w.clone() };
        assert_eq!(monic_from_zeros(&empty), Polynomial::one());
        let double = ZeroMultiset { zeros: vec![(c(0.3, 0.0), 2)], ..w };
        let expect = [c(0.09, 0.0), c(-0.6, 0.0), c(1.0, 0.0)];
        let p = monic_from_zeros(&double);
        assert!(p.coeffs().iter().zip(expect).all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn fast_path_matches_full_solver() {
        for spec in ["unit", "geom:rho=0.9", "fock:p=2,alpha=1"] {
            let a: CoefficientSequence = spec.parse().unwrap();
            let s = if spec.starts_with("fock") { 2.5 } else { 0.9 };
            for i in 0..30 {
                let f = sample_gaf(&a, s, 4, i).unwrap().polynomial();
                let full = zero_multiset(&f, s).unwrap();
                let fast = inner_zero_multiset(&f, s).unwrap();
                assert_eq!(full.certified, fast.certified, "{spec} #{i}");
                if full.certified {
                    assert!(max_matching_distance(&full.expanded(), &fast.expanded()) < 1e-9, "{spec} #{i}");
                }
            }
        }
    }

    #[test]
    fn sampled_zero_sets_are_certified_and_simple() {
        let a = CoefficientSequence::unit();
        let (mut certified, mut simple) = (0, 0);
        let n = 300;
        for i in 0..n {
            let z = zero_multiset(&sample_gaf(&a, 0.9, 8, i).unwrap().polynomial(), 0.9).unwrap();
            certified += z.certified as usize;
            simple += z.all_simple() as usize;
        }
        assert!(certified as f64 >= 0.99 * n as f64);
        assert_eq!(simple, n as usize);
    }

    fn multiset_strategy() -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((0.05f64..0.85, 0.0f64..TAU), 0..50)
            .prop_map(|v| v.into_iter().map(|(r, t)| Complex64::from_polar(r, t)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn round_trip(w in multiset_strategy()) {
            // well-separated points keep the check about the solver, not conditioning
            let min_gap = w.iter().enumerate()
                .flat_map(|(i, a)| w[i + 1..].iter().map(move |b| (a - b).norm()))
                .fold(f64::INFINITY, f64::min);
            prop_assume!(min_gap > 0.02);
            let p = monic_from_roots(&w);
            let z = zero_multiset(&p, 0.9).unwrap();
            prop_assert!(z.certified);
            prop_assert!(z.all_simple());
            prop_assert!(max_matching_distance(&w, &z.expanded()) < 1e-8);
        }

        #[test]
        fn count_matches_roots(coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..40), s in 0.2f64..1.5) {
            let f = Polynomial::new(coeffs.into_iter().map(|(a, b)| c(a, b)).collect());
            prop_assume!(f.degree() >= 1);
            let roots = find_roots(&f).unwrap();
            prop_assume!(roots.roots.iter().all(|(z, _)| (z.norm() - s).abs() > 1e-4));
            let inside: usize = roots.roots.iter().filter(|(z, _)| z.norm() < s).map(|(_, m)| m).sum();
            prop_assert_eq!(count_zeros_disk(&f, s).unwrap(), inside);
        }
    }
}
