//! Sine integral and integer-order Bessel functions.

use num_complex::Complex;

use crate::Scalar;

/// `Si(x) = ∫₀ˣ sin t / t dt`, odd in `x`.
///
/// Power series below 4; above, the auxiliary functions come from the
/// continued fraction for `E₁(ix)` (modified Lentz).
pub fn sine_integral<T: Scalar>(x: T) -> T {
    if x < T::zero() {
        return -sine_integral(-x);
    }
    if x == T::zero() {
        return T::zero();
    }
    if x.is_infinite() {
        return T::FRAC_PI_2();
    }
    if x < T::c(4.0) {
        si_series(x)
    } else {
        si_continued_fraction(x)
    }
}

fn si_series<T: Scalar>(x: T) -> T {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = T::zero();
    for _ in 0..60 {
        let k = T::c(2.0) * n;
        term = -term * x2 / ((k + T::c(2.0)) * (k + T::c(3.0)));
        let contrib = term / (k + T::c(3.0));
        sum += contrib;
        n += T::one();
        if contrib.abs() <= T::epsilon() * sum.abs() {
            break;
        }
    }
    sum
}

fn si_continued_fraction<T: Scalar>(x: T) -> T {
    let one = Complex::new(T::one(), T::zero());
    let tiny = T::min_positive_value() / T::epsilon();
    let mut b = Complex::new(T::one(), x);
    let mut c = Complex::new(T::one() / tiny, T::zero());
    let mut d = one / b;
    let mut h = d;
    for i in 2..200 {
        let k = T::c(f64::from(i - 1));
        let a = -(k * k);
        b = b + Complex::new(T::c(2.0), T::zero());
        d = one / (d * a + b);
        c = b + Complex::new(a, T::zero()) / c;
        let del = c * d;
        h = h * del;
        if (del.re - T::one()).abs() + del.im.abs() < T::epsilon() {
            break;
        }
    }
    let h = Complex::new(x.cos(), -x.sin()) * h;
    T::FRAC_PI_2() + h.im
}

/// `[J₀(z), J₁(z), …, J_nmax(z)]` by Miller's backward recurrence,
/// normalised with `J₀ + 2 Σ J₂ₖ = 1`.
pub fn bessel_j_upto<T: Scalar>(nmax: usize, z: T) -> Vec<T> {
    let mut out = vec![T::zero(); nmax + 1];
    if z == T::zero() {
        out[0] = T::one();
        return out;
    }
    let ax = z.abs();
    let span = nmax.max(ax.ceil().to_usize().unwrap_or(usize::MAX / 4));
    let start = 2 * ((span + 20 + ((40 * span) as f64).sqrt() as usize) / 2);

    let big = T::c(1e250);
    let small = T::c(1e-250);
    let two_over_x = T::c(2.0) / ax;
    let mut j_next = T::zero();
    let mut j = T::c(1e-30);
    let mut norm = T::zero();
    for k in (1..=start).rev() {
        let j_prev = T::c(k as f64) * two_over_x * j - j_next;
        j_next = j;
        j = j_prev;
        let order = k - 1;
        if order <= nmax {
            out[order] = j;
        }
        if order == 0 {
            norm += j;
        } else if order % 2 == 0 {
            norm += T::c(2.0) * j;
        }
        if j.abs() > big {
            j = j * small;
            j_next = j_next * small;
            norm = norm * small;
            for v in out.iter_mut() {
                *v = *v * small;
            }
        }
    }
    for (n, v) in out.iter_mut().enumerate() {
        *v = *v / norm;
        if z < T::zero() && n % 2 == 1 {
            *v = -*v;
        }
    }
    out
}
