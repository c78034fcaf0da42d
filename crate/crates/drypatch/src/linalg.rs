//! Banded LU with partial pivoting and a bordered variant for the
//! arclength corrector.
//!
//! Storage follows the LAPACK band layout: a matrix with `kl` sub- and
//! `ku` superdiagonals is held column-major in `2 kl + ku + 1` rows so
//! row interchanges have space to fill in.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandedMatrix {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    ldab: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        BandedMatrix {
            n,
            kl,
            ku,
            ldab,
            data: vec![0.0; ldab * n],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        // entry (i, j) lives at row kl + ku + i - j of column j
        j * self.ldab + (self.kl + self.ku + i - j)
    }

    /// Sets an entry inside the declared band; ignores exact zeros outside
    /// in debug builds this asserts the entry is representable.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n);
        debug_assert!(
            j + self.kl >= i && i + self.ku >= j,
            "({i},{j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let at = self.idx(i, j);
        self.data[at] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let at = self.idx(i, j);
        self.data[at] += v;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl + self.ku < i || i + self.ku + self.kl < j {
            return 0.0;
        }
        self.data[self.idx(i, j)]
    }

    /// Factors in place with partial pivoting; returns the factored form.
    pub fn factor(mut self) -> Result<BandedLu> {
        let (n, kl, kv) = (self.n, self.kl, self.kl + self.ku);
        let mut ipiv = vec![0usize; n];
        for j in 0..n {
            let imax = (j + 1..=(j + kl).min(n - 1))
                .fold(j, |best, i| {
                    if self.data[self.idx(i, j)].abs() > self.data[self.idx(best, j)].abs() {
                        i
                    } else {
                        best
                    }
                });
            ipiv[j] = imax;
            if imax != j {
                for jj in j..=(j + kv).min(n - 1) {
                    let (p, q) = (self.idx(j, jj), self.idx(imax, jj));
                    self.data.swap(p, q);
                }
            }
            let pivot = self.data[self.idx(j, j)];
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::LinearSolveFailure(format!(
                    "zero pivot at column {j}"
                )));
            }
            for i in j + 1..=(j + kl).min(n - 1) {
                let at_ij = self.idx(i, j);
                let m = self.data[at_ij] / pivot;
                self.data[at_ij] = m;
                if m != 0.0 {
                    for jj in j + 1..=(j + kv).min(n - 1) {
                        let u = self.data[self.idx(j, jj)];
                        if u != 0.0 {
                            let at = self.idx(i, jj);
                            self.data[at] -= m * u;
                        }
                    }
                }
            }
        }
        Ok(BandedLu { mat: self, ipiv })
    }
}

/// The factored form produced by [`BandedMatrix::factor`].
#[derive(Debug, Clone)]
pub struct BandedLu {
    mat: BandedMatrix,
    ipiv: Vec<usize>,
}

impl BandedLu {
    pub fn n(&self) -> usize {
        self.mat.n
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, kl, kv) = (self.mat.n, self.mat.kl, self.mat.kl + self.mat.ku);
        debug_assert_eq!(b.len(), n);
        for j in 0..n {
            if self.ipiv[j] != j {
                b.swap(j, self.ipiv[j]);
            }
            let bj = b[j];
            if bj != 0.0 {
                for i in j + 1..=(j + kl).min(n - 1) {
                    b[i] -= self.mat.data[self.mat.idx(i, j)] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.mat.data[self.mat.idx(j, j)];
            let bj = b[j];
            if bj != 0.0 {
                let lo = j.saturating_sub(kv);
                for i in lo..j {
                    b[i] -= self.mat.data[self.mat.idx(i, j)] * bj;
                }
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Solves the bordered system
///
/// ```text
/// [ A   t ] [x]   [f]
/// [ c^T d ] [y] = [g]
/// ```
///
/// with banded `A`, by banded elimination that carries the dense column
/// `t` and eliminates the dense row `c` alongside. Pivoting stays inside
/// the band rows, so a singular corner (a fold in `A`) is absorbed by the
/// final `1x1` border pivot instead of breaking the factorization.
pub fn solve_bordered(
    a: BandedMatrix,
    t: &[f64],
    c: &[f64],
    d: f64,
    f: &[f64],
    g: f64,
) -> Result<(Vec<f64>, f64)> {
    let fact = BorderedFactors::new(a, t, c, d)?;
    fact.solve(f, g)
}

/// Factored bordered system, reusable across right-hand sides.
pub struct BorderedFactors {
    orig: BandedMatrix,
    orig_t: Vec<f64>,
    orig_c: Vec<f64>,
    orig_d: f64,
    a: BandedMatrix,
    t: Vec<f64>,
    cm: Vec<f64>,
    d: f64,
    ipiv: Vec<usize>,
}

impl BorderedFactors {
    pub fn new(a: BandedMatrix, t: &[f64], c: &[f64], d: f64) -> Result<Self> {
        let orig = a.clone();
        factor_bordered(a, t, c, d, orig)
    }

    /// Solves for one right-hand side with two steps of iterative
    /// refinement; tiny regularised pivots at folds make the first pass
    /// inaccurate and the refinement recovers full precision.
    pub fn solve(&self, f: &[f64], g: f64) -> Result<(Vec<f64>, f64)> {
        let n = self.orig.n;
        let (mut x, mut y) = self.solve_once(f, g);
        for _ in 0..2 {
            // residual of the full bordered system
            let mut rf = vec![0.0; n];
            for i in 0..n {
                let lo = i.saturating_sub(self.orig.kl);
                let hi = (i + self.orig.ku).min(n - 1);
                let mut acc = 0.0;
                for j in lo..=hi {
                    acc += self.orig.get(i, j) * x[j];
                }
                rf[i] = f[i] - acc - self.orig_t[i] * y;
            }
            let rg = g - self.orig_c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum::<f64>()
                - self.orig_d * y;
            let rnorm = rf.iter().fold(rg.abs(), |m, v| m.max(v.abs()));
            let xscale = x.iter().fold(y.abs(), |m, v| m.max(v.abs())).max(1e-300);
            if !rnorm.is_finite() {
                return Err(Error::LinearSolveFailure("non-finite residual".into()));
            }
            if rnorm < 1e-14 * xscale.max(1.0) {
                break;
            }
            let (dx, dy) = self.solve_once(&rf, rg);
            for i in 0..n {
                x[i] += dx[i];
            }
            y += dy;
        }
        Ok((x, y))
    }

    fn solve_once(&self, f: &[f64], g: f64) -> (Vec<f64>, f64) {
        let (n, kl) = (self.a.n, self.a.kl);
        let kv = self.a.kl + self.a.ku;
        let mut b = f.to_vec();
        let mut gg = g;
        for j in 0..n {
            if self.ipiv[j] != j {
                b.swap(j, self.ipiv[j]);
            }
            let bj = b[j];
            if bj != 0.0 {
                for i in j + 1..=(j + kl).min(n - 1) {
                    b[i] -= self.a.data[self.a.idx(i, j)] * bj;
                }
            }
            gg -= self.cm[j] * b[j];
        }
        let y = gg / self.d;
        for i in 0..n {
            b[i] -= self.t[i] * y;
        }
        for j in (0..n).rev() {
            b[j] /= self.a.data[self.a.idx(j, j)];
            let bj = b[j];
            if bj != 0.0 {
                let lo = j.saturating_sub(kv);
                for i in lo..j {
                    b[i] -= self.a.data[self.a.idx(i, j)] * bj;
                }
            }
        }
        (b, y)
    }
}

fn factor_bordered(
    a: BandedMatrix,
    t: &[f64],
    c: &[f64],
    d: f64,
    orig: BandedMatrix,
) -> Result<BorderedFactors> {
    let (n, kl) = (a.n, a.kl);
    let kv = a.kl + a.ku;
    debug_assert_eq!(t.len(), n);
    debug_assert_eq!(c.len(), n);
    let orig_t = t.to_vec();
    let orig_c = c.to_vec();
    let orig_d = d;
    let mut a = a;
    let mut t = t.to_vec();
    let mut c = c.to_vec();
    let mut d = d;
    let mut cm = vec![0.0; n]; // multipliers of the dense row
    let mut ipiv = vec![0usize; n];
    let scale = a
        .data
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1e-300);

    for j in 0..n {
        let imax = (j + 1..=(j + kl).min(n - 1)).fold(j, |best, i| {
            if a.data[a.idx(i, j)].abs() > a.data[a.idx(best, j)].abs() {
                i
            } else {
                best
            }
        });
        ipiv[j] = imax;
        if imax != j {
            for jj in j..=(j + kv).min(n - 1) {
                let (p, q) = (a.idx(j, jj), a.idx(imax, jj));
                a.data.swap(p, q);
            }
            t.swap(j, imax);
        }
        let mut pivot = a.data[a.idx(j, j)];
        if !pivot.is_finite() {
            return Err(Error::LinearSolveFailure(format!(
                "non-finite pivot at column {j}"
            )));
        }
        if pivot == 0.0 {
            // an exactly singular interior (a fold direction): nudge the
            // pivot by a relative epsilon and let the border row absorb
            // the null direction; the perturbation to the full bordered
            // matrix is O(eps * scale).
            pivot = 1e-14 * scale;
            let at = a.idx(j, j);
            a.data[at] = pivot;
        }
        for i in j + 1..=(j + kl).min(n - 1) {
            let at_ij = a.idx(i, j);
            let m = a.data[at_ij] / pivot;
            a.data[at_ij] = m;
            if m != 0.0 {
                for jj in j + 1..=(j + kv).min(n - 1) {
                    let u = a.data[a.idx(j, jj)];
                    if u != 0.0 {
                        let at = a.idx(i, jj);
                        a.data[at] -= m * u;
                    }
                }
                t[i] -= m * t[j];
            }
        }
        // eliminate the dense row entry below this pivot
        let mc = c[j] / pivot;
        cm[j] = mc;
        if mc != 0.0 {
            for jj in j + 1..=(j + kv).min(n - 1) {
                let u = a.data[a.idx(j, jj)];
                if u != 0.0 {
                    c[jj] -= mc * u;
                }
            }
            d -= mc * t[j];
        }
    }

    if d == 0.0 || !d.is_finite() {
        return Err(Error::LinearSolveFailure(format!(
            "singular border pivot d = {d}"
        )));
    }
    Ok(BorderedFactors {
        orig,
        orig_t,
        orig_c,
        orig_d,
        a,
        t,
        cm,
        d,
        ipiv,
    })
}

/// Eigenvalues of a dense real matrix via Householder reduction to
/// Hessenberg form followed by the shifted double QR iteration.
///
/// Derived from the Algol procedure hqr2 (Martin and Wilkinson) as carried
/// into EISPACK and JAMA, eigenvalues only. A hard iteration cap turns the
/// rare non-converging case into an error instead of a spin.
#[allow(unused_assignments)]
pub fn dense_eigenvalues(a: &nalgebra::DMatrix<f64>) -> Result<Vec<num_complex::Complex64>> {
    use num_complex::Complex64;
    let nn = a.nrows();
    assert_eq!(nn, a.ncols(), "square matrix required");
    if nn == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone_owned();
    let (low, high) = (0usize, nn - 1);

    // Householder reduction to upper Hessenberg (orthes, vectors dropped)
    let mut ort = vec![0.0; nn];
    for m in (low + 1)..high {
        let mut scale = 0.0;
        for i in m..=high {
            scale += h[(i, m - 1)].abs();
        }
        if scale != 0.0 {
            let mut hsum = 0.0;
            for i in (m..=high).rev() {
                ort[i] = h[(i, m - 1)] / scale;
                hsum += ort[i] * ort[i];
            }
            let mut g = hsum.sqrt();
            if ort[m] > 0.0 {
                g = -g;
            }
            let hh = hsum - ort[m] * g;
            ort[m] -= g;
            for j in m..nn {
                let mut f = 0.0;
                for i in (m..=high).rev() {
                    f += ort[i] * h[(i, j)];
                }
                f /= hh;
                for i in m..=high {
                    h[(i, j)] -= f * ort[i];
                }
            }
            for i in 0..=high {
                let mut f = 0.0;
                for j in (m..=high).rev() {
                    f += ort[j] * h[(i, j)];
                }
                f /= hh;
                for j in m..=high {
                    h[(i, j)] -= f * ort[j];
                }
            }
            h[(m, m - 1)] = scale * g;
        }
    }

    // hqr: shifted double QR iteration on the Hessenberg matrix
    let eps = 2.0_f64.powi(-52);
    let mut d = vec![0.0; nn];
    let mut e = vec![0.0; nn];
    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[(i, j)].abs();
        }
    }
    if norm == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); nn]);
    }
    let mut n = nn - 1;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z);
    let (mut w, mut x, mut y);
    p = 0.0;
    q = 0.0;
    r = 0.0;
    let mut iter = 0usize;
    let mut total_iter = 0usize;
    let max_total = 40 * nn + 100;
    'outer: loop {
        total_iter += 1;
        if total_iter > max_total {
            return Err(Error::EigenFailure(format!(
                "QR iteration exceeded {max_total} sweeps"
            )));
        }
        // look for a single small subdiagonal element
        let mut l = n;
        while l > low {
            s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[(l, l - 1)].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // one root found
            d[n] = h[(n, n)] + exshift;
            e[n] = 0.0;
            if n == low {
                break 'outer;
            }
            n -= 1;
            iter = 0;
        } else if l + 1 == n {
            // two roots found
            w = h[(n, n - 1)] * h[(n - 1, n)];
            p = (h[(n - 1, n - 1)] - h[(n, n)]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            x = h[(n, n)] + exshift;
            if q >= 0.0 {
                // real pair
                z = if p >= 0.0 { p + z } else { p - z };
                d[n - 1] = x + z;
                d[n] = if z != 0.0 { x - w / z } else { d[n - 1] };
                e[n - 1] = 0.0;
                e[n] = 0.0;
            } else {
                // complex pair
                d[n - 1] = x + p;
                d[n] = x + p;
                e[n - 1] = z;
                e[n] = -z;
            }
            if n < low + 2 {
                break 'outer;
            }
            n -= 2;
            iter = 0;
        } else {
            // form shift
            x = h[(n, n)];
            y = h[(n - 1, n - 1)];
            w = h[(n, n - 1)] * h[(n - 1, n)];
            if iter == 10 || iter == 20 {
                // exceptional shift
                exshift += x;
                for i in low..=n {
                    h[(i, i)] -= x;
                }
                s = h[(n, n - 1)].abs() + h[(n - 1, n - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=n {
                        h[(i, i)] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            // look for two consecutive small subdiagonal elements
            let mut m = n - 2;
            loop {
                z = h[(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[(m, m - 1)].abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=n {
                h[(i, i - 2)] = 0.0;
                if i > m + 2 {
                    h[(i, i - 3)] = 0.0;
                }
            }
            // double QR sweep on rows l..=n, columns m..=n
            for k in m..n {
                let notlast = k != n - 1;
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast { h[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        h[(k, k - 1)] = -s * x;
                    } else if l != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..nn {
                        p = h[(k, j)] + q * h[(k + 1, j)];
                        if notlast {
                            p += r * h[(k + 2, j)];
                            h[(k + 2, j)] -= p * z;
                        }
                        h[(k, j)] -= p * x;
                        h[(k + 1, j)] -= p * y;
                    }
                    for i in 0..=n.min(k + 3) {
                        p = x * h[(i, k)] + y * h[(i, k + 1)];
                        if notlast {
                            p += z * h[(i, k + 2)];
                            h[(i, k + 2)] -= p * r;
                        }
                        h[(i, k)] -= p;
                        h[(i, k + 1)] -= p * q;
                    }
                }
            }
        }
    }
    Ok(d
        .into_iter()
        .zip(e)
        .map(|(re, im)| Complex64::new(re, im))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use num_complex::Complex64;

    /// Small deterministic generator so tests need no external seed state.
    struct XorShift(u64);
    impl XorShift {
        fn next_f64(&mut self) -> f64 {
            let mut x = self.0;
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            self.0 = x;
            (x >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        }
    }

    fn random_banded(n: usize, kl: usize, ku: usize, rng: &mut XorShift) -> (BandedMatrix, DMatrix<f64>) {
        let mut band = BandedMatrix::zeros(n, kl, ku);
        let mut dense = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                let mut v = rng.next_f64();
                if i == j {
                    v += 3.0_f64.copysign(v); // keep it comfortably nonsingular
                }
                band.set(i, j, v);
                dense[(i, j)] = v;
            }
        }
        (band, dense)
    }

    #[test]
    fn banded_lu_matches_dense_solve() {
        let mut rng = XorShift(0x1234_5678_9abc_def1);
        for &(n, kl, ku) in &[(12usize, 1usize, 1usize), (40, 3, 2), (90, 2, 4), (200, 3, 3)] {
            let (band, dense) = random_banded(n, kl, ku, &mut rng);
            let b: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
            let lu = band.factor().unwrap();
            let x = lu.solve(&b);
            let xd = dense
                .clone()
                .lu()
                .solve(&DVector::from_column_slice(&b))
                .unwrap();
            for i in 0..n {
                assert!(
                    (x[i] - xd[i]).abs() < 1e-9 * (1.0 + xd[i].abs()),
                    "n={n} kl={kl} ku={ku} i={i}: {} vs {}",
                    x[i],
                    xd[i]
                );
            }
        }
    }

    #[test]
    fn banded_lu_pivots_on_weak_diagonal() {
        // diagonal dominance broken on purpose; partial pivoting must cope
        let n = 30;
        let mut band = BandedMatrix::zeros(n, 2, 2);
        let mut dense = DMatrix::zeros(n, n);
        let mut rng = XorShift(42);
        for i in 0..n {
            for j in i.saturating_sub(2)..=(i + 2).min(n - 1) {
                let v = if i == j { 1e-11 * rng.next_f64() } else { rng.next_f64() };
                band.set(i, j, v);
                dense[(i, j)] = v;
            }
        }
        let b: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        let x = band.factor().unwrap().solve(&b);
        let xd = dense.lu().solve(&DVector::from_column_slice(&b)).unwrap();
        for i in 0..n {
            assert!((x[i] - xd[i]).abs() < 1e-6 * (1.0 + xd[i].abs()));
        }
    }

    #[test]
    fn bordered_solve_matches_dense() {
        let mut rng = XorShift(0xdead_beef_cafe_f00d);
        for &(n, kl, ku) in &[(25usize, 3usize, 2usize), (80, 2, 2)] {
            let (band, dense) = random_banded(n, kl, ku, &mut rng);
            let t: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
            let c: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
            let d = rng.next_f64();
            let f: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
            let g = rng.next_f64();
            let (x, y) = solve_bordered(band, &t, &c, d, &f, g).unwrap();
            let mut full = DMatrix::zeros(n + 1, n + 1);
            full.view_mut((0, 0), (n, n)).copy_from(&dense);
            for i in 0..n {
                full[(i, n)] = t[i];
                full[(n, i)] = c[i];
            }
            full[(n, n)] = d;
            let mut rhs = DVector::zeros(n + 1);
            for i in 0..n {
                rhs[i] = f[i];
            }
            rhs[n] = g;
            let sol = full.lu().solve(&rhs).unwrap();
            for i in 0..n {
                assert!((x[i] - sol[i]).abs() < 1e-8 * (1.0 + sol[i].abs()), "i={i}");
            }
            assert!((y - sol[n]).abs() < 1e-8 * (1.0 + sol[n].abs()));
        }
    }

    #[test]
    fn dense_eigenvalues_on_known_spectra() {
        // diagonal
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0, 0.5]));
        let mut ev: Vec<f64> = dense_eigenvalues(&m).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 0.5).abs() < 1e-12 && (ev[2] - 3.0).abs() < 1e-12);
        // rotation block: eigenvalues a +- bi
        let m = DMatrix::from_row_slice(2, 2, &[1.5, -2.0, 2.0, 1.5]);
        let ev = dense_eigenvalues(&m).unwrap();
        assert!(ev.iter().any(|z| (z - Complex64::new(1.5, 2.0)).norm() < 1e-12));
        assert!(ev.iter().any(|z| (z - Complex64::new(1.5, -2.0)).norm() < 1e-12));
        // symmetric tridiagonal Toeplitz: lambda_j = -2 + 2 cos(j pi/(n+1))
        let n = 40;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = -2.0;
            if i > 0 {
                m[(i, i - 1)] = 1.0;
                m[(i - 1, i)] = 1.0;
            }
        }
        let mut ev: Vec<f64> = dense_eigenvalues(&m).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut want: Vec<f64> = (1..=n)
            .map(|j| -2.0 + 2.0 * (j as f64 * core::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, w) in ev.iter().zip(want) {
            assert!((g - w).abs() < 1e-10);
        }
    }

    #[test]
    fn dense_eigenvalues_companion_quartet() {
        // lambda^4 - (1 + K P) lambda^2 + P with a complex quartet; this
        // class of companion matrices stalls some QR implementations
        let big_k = -2.6394904458598726_f64;
        for p in [0.3, 1.2035911601023981, 1.2135911601023981] {
            let coeffs = [1.0, 0.0, -(1.0 + big_k * p), 0.0, p];
            let mut m = DMatrix::zeros(4, 4);
            for i in 1..4 {
                m[(i, i - 1)] = 1.0;
            }
            for i in 0..4 {
                m[(i, 3)] = -coeffs[4 - i];
            }
            let ev = dense_eigenvalues(&m).unwrap();
            for z in ev {
                // residual of the quartic
                let mut acc = Complex64::new(0.0, 0.0);
                for &c in &coeffs {
                    acc = acc * z + c;
                }
                assert!(acc.norm() < 1e-8, "P={p}: residual {} at {z}", acc.norm());
            }
        }
    }

    #[test]
    fn bordered_solve_survives_singular_interior() {
        // A has a one-dimensional null space (a fold); the border makes the
        // full system regular and the bordered elimination must still solve it.
        let n = 20;
        let mut band = BandedMatrix::zeros(n, 1, 1);
        let mut dense = DMatrix::zeros(n, n);
        for i in 0..n {
            // tridiagonal Neumann Laplacian: singular with constant null vector
            let dv = if i == 0 || i == n - 1 { -1.0 } else { -2.0 };
            band.set(i, i, dv);
            dense[(i, i)] = dv;
            if i > 0 {
                band.set(i, i - 1, 1.0);
                dense[(i, i - 1)] = 1.0;
            }
            if i + 1 < n {
                band.set(i, i + 1, 1.0);
                dense[(i, i + 1)] = 1.0;
            }
        }
        let t = vec![1.0; n]; // couples to the null direction
        let c = vec![1.0; n];
        let d = 0.0;
        let f: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let g = 0.25;
        let (x, y) = solve_bordered(band, &t, &c, d, &f, g).unwrap();
        // verify against dense solve of the full bordered system
        let mut full = DMatrix::zeros(n + 1, n + 1);
        full.view_mut((0, 0), (n, n)).copy_from(&dense);
        for i in 0..n {
            full[(i, n)] = 1.0;
            full[(n, i)] = 1.0;
        }
        let mut rhs = DVector::zeros(n + 1);
        for i in 0..n {
            rhs[i] = f[i];
        }
        rhs[n] = g;
        let sol = full.lu().solve(&rhs).unwrap();
        for i in 0..n {
            assert!((x[i] - sol[i]).abs() < 1e-8 * (1.0 + sol[i].abs()));
        }
        assert!((y - sol[n]).abs() < 1e-8);
    }
}
