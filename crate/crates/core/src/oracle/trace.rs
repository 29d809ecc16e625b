use super::matrix::{OperatorSpec, Sparse, TruncatedOperator};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

fn c0() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn fmt_c(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn nearest_eigenvalue(p: &DMatrix<Complex64>, lambda: Complex64) -> String {
    match p.clone().schur().eigenvalues() {
        Some(ev) => ev
            .iter()
            .min_by(|a, b| (**a - lambda).norm().total_cmp(&(**b - lambda).norm()))
            .map(|z| fmt_c(*z))
            .unwrap_or_else(|| "none".into()),
        None => "unavailable".into(),
    }
}

fn shifted(p: &DMatrix<Complex64>, lambda: Complex64) -> DMatrix<Complex64> {
    let mut m = p.clone();
    for i in 0..m.nrows() {
        m[(i, i)] -= lambda;
    }
    m
}

fn solve_shifted(p: &DMatrix<Complex64>, lambda: Complex64, rhs: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let lu = shifted(p, lambda).lu();
    let collision = || Error::SpectralCollision {
        lambda: fmt_c(lambda),
        nearest: nearest_eigenvalue(p, lambda),
    };
    let u = lu.u();
    let diag_max = u.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let diag_min = u.diagonal().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if !(diag_min > 1e-13 * diag_max.max(1.0)) {
        return Err(collision());
    }
    let x = lu.solve(rhs).ok_or_else(collision)?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(collision());
    }
    Ok(x)
}

/// Tr(A(P − λ)^{−1}) on the retained modes by a dense solve.
pub fn resolvent_trace(a: &TruncatedOperator, p: &TruncatedOperator, lambda: Complex64) -> Result<Complex64> {
    if a.size() != p.size() {
        return Err(Error::usage("A and P truncated at different cutoffs"));
    }
    Ok(solve_shifted(&p.matrix, lambda, &a.matrix)?.trace())
}

/// Tr(A(P − λ)^{−N}).
pub fn resolvent_power_trace(
    a: &TruncatedOperator,
    p: &TruncatedOperator,
    lambda: Complex64,
    power: u32,
) -> Result<Complex64> {
    if power == 0 {
        return Err(Error::usage("resolvent power must be at least 1"));
    }
    if a.size() != p.size() {
        return Err(Error::usage("A and P truncated at different cutoffs"));
    }
    let mut x = a.matrix.clone();
    for _ in 0..power {
        x = solve_shifted(&p.matrix, lambda, &x)?;
    }
    Ok(x.trace())
}

/// f^{(k)}(λ)/k! from samples on the circle |z − λ| = r.
pub fn cauchy_taylor_coefficient<F>(mut f: F, lambda: Complex64, k: u32, radius: f64, points: usize) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let mut s = c0();
    for j in 0..points {
        let w = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / points as f64);
        s += f(lambda + w * radius)? * (w * radius).powi(-(k as i32));
    }
    Ok(s / points as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceValue {
    pub value: Complex64,
    pub cutoff: i64,
    pub second_cutoff: i64,
    pub second_value: Complex64,
    pub truncation_estimate: f64,
}

/// resolvent_trace at K, with |value(K′) − value(K)| as the truncation
/// estimate.
pub fn resolvent_trace_estimated(
    a: &OperatorSpec,
    p: &OperatorSpec,
    dim: usize,
    cutoff: i64,
    lambda: Complex64,
) -> Result<TraceValue> {
    let k2 = cutoff + (cutoff / 2).max(4);
    let v1 = resolvent_trace(
        &TruncatedOperator::build(a, dim, cutoff)?,
        &TruncatedOperator::build(p, dim, cutoff)?,
        lambda,
    )?;
    let v2 = resolvent_trace(
        &TruncatedOperator::build(a, dim, k2)?,
        &TruncatedOperator::build(p, dim, k2)?,
        lambda,
    )?;
    Ok(TraceValue {
        value: v1,
        cutoff,
        second_cutoff: k2,
        second_value: v2,
        truncation_estimate: (v2 - v1).norm(),
    })
}

/// ζ(s, a) = Σ_{k≥0} (k + a)^{−s} for s > 1 and large a (Euler–Maclaurin).
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    // shift up until the asymptotic series is accurate
    let mut head = 0.0;
    let mut a = a;
    while a < 20.0 {
        head += a.powf(-s);
        a += 1.0;
    }
    const B: [f64; 6] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0];
    let mut sum = a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    let mut rising = s; // s(s+1)…(s+2k−2)
    let mut fact = 2.0; // (2k)!
    for (k, b) in B.iter().enumerate() {
        let kk = k as f64 + 1.0;
        sum += b / fact * rising * a.powf(-s - 2.0 * kk + 1.0);
        rising *= (s + 2.0 * kk - 1.0) * (s + 2.0 * kk);
        fact *= (2.0 * kk + 1.0) * (2.0 * kk + 2.0);
    }
    head + sum
}

/// Σ_{k ≥ start} g(k) from samples of g near the end of the explicit range:
/// powers p₀..p₀+3 fitted by least squares, summed with Hurwitz zeta.
pub fn power_law_tail(g: &[(f64, Complex64)], start: f64) -> Result<Complex64> {
    if g.is_empty() || g.iter().all(|(_, v)| v.norm() == 0.0) {
        return Ok(c0());
    }
    let (k1, g1) = g[0];
    let (k2, g2) = g[g.len() - 1];
    if g1.norm() == 0.0 || g2.norm() == 0.0 {
        return Ok(c0());
    }
    let slope = (g2.norm() / g1.norm()).ln() / (k2 / k1).ln();
    let p0 = (-slope).round();
    if p0 <= 1.0 {
        return Err(Error::Oracle(format!(
            "tail decays like k^{slope:.2}, too slowly for a finite sum"
        )));
    }
    let powers: Vec<f64> = (0..4).map(|j| p0 + j as f64).collect();
    let m = DMatrix::from_fn(g.len(), powers.len(), |i, j| Complex64::new((g[i].0 / k2).powf(-powers[j]), 0.0));
    let rhs = DVector::from_iterator(g.len(), g.iter().map(|(_, v)| *v));
    let coef = m
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Oracle(format!("tail fit failed: {e}")))?;
    Ok(powers
        .iter()
        .zip(coef.iter())
        .map(|(pw, c)| c * k2.powf(*pw) * hurwitz_zeta(*pw, start))
        .sum())
}

/// First-order Neumann correction for the modes outside the box on T¹:
/// pairs (k, l) with |k| or |l| > K, summed explicitly to the tail cutoff,
/// plus a fitted power-law remainder of the diagonal beyond it.
#[derive(Clone, Debug)]
struct TailModel {
    tail_cutoff: i64,
    offset: i64,
    /// Diagonal entries of each P for |k| ≤ tail_cutoff + bandwidth.
    diag: Vec<Vec<Complex64>>,
    /// (k, A_kk) for K < |k| ≤ tail_cutoff.
    a_diag: Vec<(i64, Complex64)>,
    /// (k, l, A_lk, P_kl per P) with k ≠ l.
    pairs: Vec<(i64, i64, Complex64, Vec<Complex64>)>,
    /// (k, A_kk, A_{−k,−k}) at the outer end, for the remainder fit.
    a_far: Vec<(i64, Complex64, Complex64)>,
    /// Sign of each P's contribution.
    signs: Vec<f64>,
}

fn col1(spec: &OperatorSpec, k: i64) -> Sparse {
    spec.column(&[k])
}

impl TailModel {
    fn build(a: &OperatorSpec, ps: &[&OperatorSpec], signs: Vec<f64>, cutoff: i64, tail_cutoff: i64) -> Self {
        let bw = ps.iter().map(|p| p.bandwidth()).max().unwrap_or(0) + a.bandwidth();
        let reach = tail_cutoff + bw;
        let offset = reach;
        let mut diag = vec![vec![c0(); (2 * reach + 1) as usize]; ps.len()];
        let mut cols: Vec<Vec<Sparse>> = vec![Vec::with_capacity((2 * reach + 1) as usize); ps.len()];
        for (pi, p) in ps.iter().enumerate() {
            for k in -reach..=reach {
                let c = col1(p, k);
                diag[pi][(k + offset) as usize] = c.get(&vec![k]).copied().unwrap_or(c0());
                cols[pi].push(c);
            }
        }
        let mut a_diag = Vec::new();
        let mut pairs = Vec::new();
        for k in -tail_cutoff..=tail_cutoff {
            let ca = col1(a, k);
            for (l, alk) in &ca {
                let l = l[0];
                let outside = k.abs() > cutoff || l.abs() > cutoff;
                if !outside || l.abs() > reach {
                    continue;
                }
                if l == k {
                    a_diag.push((k, *alk));
                    continue;
                }
                let e: Vec<Complex64> = (0..ps.len())
                    .map(|pi| cols[pi][(l + offset) as usize].get(&vec![k]).copied().unwrap_or(c0()))
                    .collect();
                if e.iter().any(|z| z.norm() > 0.0) {
                    pairs.push((k, l, *alk, e));
                }
            }
        }
        let far_lo = (tail_cutoff / 4).max(cutoff + 1);
        let a_far = geometric_ints(far_lo, tail_cutoff, 24)
            .into_iter()
            .map(|k| {
                let entry = |k: i64| col1(a, k).get(&vec![k]).copied().unwrap_or(c0());
                (k, entry(k), entry(-k))
            })
            .collect();
        TailModel {
            tail_cutoff,
            offset,
            diag,
            a_diag,
            pairs,
            a_far,
            signs,
        }
    }

    fn d(&self, pi: usize, k: i64, lambda: Complex64) -> Complex64 {
        self.diag[pi][(k + self.offset) as usize] - lambda
    }

    fn at(&self, lambda: Complex64) -> Result<Complex64> {
        let mut s = c0();
        for (pi, sign) in self.signs.iter().enumerate() {
            for (k, akk) in &self.a_diag {
                s += akk / self.d(pi, *k, lambda) * *sign;
            }
            for (k, l, alk, e) in &self.pairs {
                s -= alk * e[pi] / (self.d(pi, *k, lambda) * self.d(pi, *l, lambda)) * *sign;
            }
            s += self.remainder(pi, lambda)? * *sign;
        }
        Ok(s)
    }

    /// Σ_{|k| > tail_cutoff} A_kk/(P_kk − λ) from a power-law fit of the
    /// symmetrized diagonal term near the tail cutoff.
    fn remainder(&self, pi: usize, lambda: Complex64) -> Result<Complex64> {
        let g: Vec<(f64, Complex64)> = self
            .a_far
            .iter()
            .map(|(k, ak, am)| (*k as f64, ak / self.d(pi, *k, lambda) + am / self.d(pi, -*k, lambda)))
            .collect();
        if g.iter().all(|(_, v)| v.norm() == 0.0) {
            return Ok(c0());
        }
        power_law_tail(&g, (self.tail_cutoff + 1) as f64)
    }
}

fn geometric_ints(lo: i64, hi: i64, count: usize) -> Vec<i64> {
    let mut v: Vec<i64> = (0..count)
        .map(|i| {
            let t = i as f64 / (count - 1) as f64;
            ((lo as f64) * (hi as f64 / lo as f64).powf(t)).round() as i64
        })
        .collect();
    v.dedup();
    v
}

#[derive(Clone, Debug)]
enum Kind {
    Single { w: Vec<Complex64>, e: Vec<f64> },
    Difference { w: DMatrix<Complex64>, e1: Vec<f64>, e2: Vec<f64> },
}

/// Resolvent traces of Hermitian truncations through one eigendecomposition,
/// with an optional tail correction on T¹.
#[derive(Clone, Debug)]
pub struct TraceOracle {
    pub dim: usize,
    pub cutoff: i64,
    kind: Kind,
    tail: Option<TailModel>,
}

fn hermitian_eigen(p: &TruncatedOperator) -> Result<SymmetricEigen<Complex64, nalgebra::Dyn>> {
    if !p.is_hermitian(1e-12) {
        return Err(Error::usage("the spectral trace path needs a Hermitian P"));
    }
    Ok(SymmetricEigen::new(p.matrix.clone()))
}

impl TraceOracle {
    /// Tr(A(P − λ)^{−1}).
    pub fn single(a: &OperatorSpec, p: &OperatorSpec, dim: usize, cutoff: i64, tail_cutoff: Option<i64>) -> Result<Self> {
        let pt = TruncatedOperator::build(p, dim, cutoff)?;
        let at = TruncatedOperator::build(a, dim, cutoff)?;
        let eig = hermitian_eigen(&pt)?;
        let u = &eig.eigenvectors;
        let m = u.adjoint() * &at.matrix * u;
        let w = (0..m.nrows()).map(|i| m[(i, i)]).collect();
        let e = eig.eigenvalues.iter().copied().collect();
        let tail = Self::tail(a, &[p], vec![1.0], dim, cutoff, tail_cutoff)?;
        Ok(TraceOracle {
            dim,
            cutoff,
            kind: Kind::Single { w, e },
            tail,
        })
    }

    /// Tr(A((P₁ − λ)^{−1} − (P₂ − λ)^{−1})) = Tr(A Q₁ (P₂ − P₁) Q₂).
    pub fn difference(
        a: &OperatorSpec,
        p1: &OperatorSpec,
        p2: &OperatorSpec,
        dim: usize,
        cutoff: i64,
        tail_cutoff: Option<i64>,
    ) -> Result<Self> {
        let t1 = TruncatedOperator::build(p1, dim, cutoff)?;
        let t2 = TruncatedOperator::build(p2, dim, cutoff)?;
        let at = TruncatedOperator::build(a, dim, cutoff)?;
        let dt = TruncatedOperator::build(&OperatorSpec::difference(p2.clone(), p1.clone()), dim, cutoff)?;
        let e1 = hermitian_eigen(&t1)?;
        let e2 = hermitian_eigen(&t2)?;
        let (u1, u2) = (&e1.eigenvectors, &e2.eigenvectors);
        let x = u1.adjoint() * &dt.matrix * u2;
        let y = u2.adjoint() * &at.matrix * u1;
        let w = DMatrix::from_fn(x.nrows(), x.ncols(), |a, b| x[(a, b)] * y[(b, a)]);
        let tail = Self::tail(a, &[p1, p2], vec![1.0, -1.0], dim, cutoff, tail_cutoff)?;
        Ok(TraceOracle {
            dim,
            cutoff,
            kind: Kind::Difference {
                w,
                e1: e1.eigenvalues.iter().copied().collect(),
                e2: e2.eigenvalues.iter().copied().collect(),
            },
            tail,
        })
    }

    fn tail(
        a: &OperatorSpec,
        ps: &[&OperatorSpec],
        signs: Vec<f64>,
        dim: usize,
        cutoff: i64,
        tail_cutoff: Option<i64>,
    ) -> Result<Option<TailModel>> {
        match tail_cutoff {
            None => Ok(None),
            Some(_) if dim != 1 => Err(Error::usage("tail correction is implemented on T1 only")),
            Some(t) if t <= cutoff => Err(Error::usage("tail cutoff must exceed the matrix cutoff")),
            Some(t) => Ok(Some(TailModel::build(a, ps, signs, cutoff, t))),
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        match &self.kind {
            Kind::Single { e, .. } => e.clone(),
            Kind::Difference { e1, .. } => e1.clone(),
        }
    }

    fn check(&self, lambda: Complex64, e: &[f64]) -> Result<()> {
        let (near, dist) = e
            .iter()
            .map(|v| (*v, (Complex64::new(*v, 0.0) - lambda).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((f64::NAN, f64::INFINITY));
        if dist < 1e-10 * near.abs().max(1.0) {
            return Err(Error::SpectralCollision {
                lambda: fmt_c(lambda),
                nearest: near.to_string(),
            });
        }
        Ok(())
    }

    /// Trace on the retained modes, without the tail.
    pub fn box_trace(&self, lambda: Complex64) -> Result<Complex64> {
        match &self.kind {
            Kind::Single { w, e } => {
                self.check(lambda, e)?;
                Ok(w.iter().zip(e).map(|(w, e)| w / (e - lambda)).sum())
            }
            Kind::Difference { w, e1, e2 } => {
                self.check(lambda, e1)?;
                self.check(lambda, e2)?;
                let r1: Vec<Complex64> = e1.iter().map(|e| (e - lambda).inv()).collect();
                let r2: Vec<Complex64> = e2.iter().map(|e| (e - lambda).inv()).collect();
                let mut s = c0();
                for a in 0..r1.len() {
                    let mut row = c0();
                    for b in 0..r2.len() {
                        row += w[(a, b)] * r2[b];
                    }
                    s += row * r1[a];
                }
                Ok(s)
            }
        }
    }

    pub fn tail_trace(&self, lambda: Complex64) -> Result<Complex64> {
        match &self.tail {
            None => Ok(c0()),
            Some(t) => t.at(lambda),
        }
    }

    pub fn at(&self, lambda: Complex64) -> Result<Complex64> {
        Ok(self.box_trace(lambda)? + self.tail_trace(lambda)?)
    }

    pub fn has_tail(&self) -> bool {
        self.tail.is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parametrix::DifferentialOperator;
    use crate::symexpr::ScalarField;

    fn shifted_laplace(m2: f64) -> OperatorSpec {
        OperatorSpec::Differential(DifferentialOperator::laplace_plus(1, ScalarField::constant(1, m2)))
    }

    fn coth_closed(lambda: f64) -> f64 {
        let s = (1.0 - lambda).sqrt();
        PI / (s * (PI * s).tanh())
    }

    #[test]
    fn hurwitz_matches_direct_sum() {
        let direct: f64 = (0..200000).map(|k| (k as f64 + 3.5).powi(-3)).sum::<f64>();
        let tail = 0.5 / (200003.5f64).powi(2);
        assert!((hurwitz_zeta(3.0, 3.5) - direct - tail).abs() < 1e-12);
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-13);
    }

    #[test]
    fn cotangent_sum_with_tail() {
        let o = TraceOracle::single(&OperatorSpec::Identity, &shifted_laplace(1.0), 1, 64, Some(4096)).unwrap();
        let v = o.at(Complex64::new(-1.0, 0.0)).unwrap();
        assert!((v.re - coth_closed(-1.0)).abs() < 1e-8, "{v}");
        let dense = resolvent_trace(
            &TruncatedOperator::build(&OperatorSpec::Identity, 1, 64).unwrap(),
            &TruncatedOperator::build(&shifted_laplace(1.0), 1, 64).unwrap(),
            Complex64::new(-1.0, 0.0),
        )
        .unwrap();
        assert!((dense - o.box_trace(Complex64::new(-1.0, 0.0)).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn off_diagonal_multiplier_has_zero_trace() {
        let a = OperatorSpec::Multiplication(ScalarField::mode(1, &[1], Complex64::new(1.0, 0.0)));
        let a_t = TruncatedOperator::build(&a, 1, 16).unwrap();
        let p_t = TruncatedOperator::build(&shifted_laplace(2.0), 1, 16).unwrap();
        assert!(resolvent_trace(&a_t, &p_t, Complex64::new(-3.0, 0.5)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn collision_is_reported() {
        let a_t = TruncatedOperator::build(&OperatorSpec::Identity, 1, 4).unwrap();
        let p_t = TruncatedOperator::build(&shifted_laplace(0.0), 1, 4).unwrap();
        let e = resolvent_trace(&a_t, &p_t, Complex64::new(1.0, 0.0)).unwrap_err();
        assert!(matches!(e, Error::SpectralCollision { .. }));
    }

    #[test]
    fn power_trace_is_cauchy_derivative() {
        let v = ScalarField::constant(1, 2.0).add(&ScalarField::cos(1, 0, 1, 1.0));
        let p = OperatorSpec::Differential(DifferentialOperator::laplace_plus(1, v));
        let a = OperatorSpec::RadialMultiplier(num_rational::Rational64::from_integer(1));
        let at = TruncatedOperator::build(&a, 1, 24).unwrap();
        let pt = TruncatedOperator::build(&p, 1, 24).unwrap();
        let lambda = Complex64::new(-5.0, 0.0);
        let direct = resolvent_power_trace(&at, &pt, lambda, 2).unwrap();
        let cauchy = cauchy_taylor_coefficient(|z| resolvent_trace(&at, &pt, z), lambda, 1, 1.0, 32).unwrap();
        assert!((direct - cauchy).norm() <= 1e-10 * direct.norm());
    }

    #[test]
    fn difference_path_matches_dense() {
        let p1 = shifted_laplace(2.0);
        let p2 = shifted_laplace(1.0);
        let a = OperatorSpec::RadialMultiplier(num_rational::Rational64::from_integer(1));
        let o = TraceOracle::difference(&a, &p1, &p2, 1, 20, None).unwrap();
        let lambda = Complex64::new(-7.0, 0.0);
        let t = |p: &OperatorSpec| {
            resolvent_trace(
                &TruncatedOperator::build(&a, 1, 20).unwrap(),
                &TruncatedOperator::build(p, 1, 20).unwrap(),
                lambda,
            )
            .unwrap()
        };
        let dense = t(&p1) - t(&p2);
        assert!((o.at(lambda).unwrap() - dense).norm() < 1e-12);
    }
}
