//! 15-point Kronrod rule with its embedded 7-point Gauss rule.

use crate::Scalar;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct RuleOutput<T> {
    pub value: T,
    pub error: T,
    /// Integral of |f|; used for the round-off floor.
    pub abs_value: T,
}

/// Apply the rule on `[a, b]`. Returns `Err(x)` at the first non-finite sample.
pub(crate) fn gk15<T: Scalar, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Result<RuleOutput<T>, T> {
    let half = T::c(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);

    let mut eval = |x: T| -> Result<T, T> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(x)
        }
    };

    let f_center = eval(center)?;
    let mut res_k = f_center * T::c(WGK[7]);
    let mut res_g = f_center * T::c(WG[3]);
    let mut res_abs = f_center.abs() * T::c(WGK[7]);
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];

    for j in 0..7 {
        let dx = half_len * T::c(XGK[j]);
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::c(WGK[j]);
        res_k += w * (f1 + f2);
        res_abs += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += T::c(WG[j / 2]) * (f1 + f2);
        }
    }

    let mean = res_k * half;
    let mut res_asc = T::c(WGK[7]) * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += T::c(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let abs_half = half_len.abs();
    let value = res_k * half_len;
    res_abs = res_abs * abs_half;
    res_asc = res_asc * abs_half;
    let error = rescale_error((res_k - res_g) * half_len, res_abs, res_asc);

    Ok(RuleOutput {
        value,
        error,
        abs_value: res_abs,
    })
}

fn rescale_error<T: Scalar>(err: T, res_abs: T, res_asc: T) -> T {
    let mut scaled = err.abs();
    if res_asc != T::zero() && scaled != T::zero() {
        let scale = (T::c(200.0) * scaled / res_asc).powf(T::c(1.5));
        scaled = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let eps = T::epsilon();
    if res_abs > T::min_positive_value() / (T::c(50.0) * eps) {
        let min_err = T::c(50.0) * eps * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_low_degree_polynomials() {
        let mut f = |x: f64| 7.0 * x.powi(6) - 3.0 * x.powi(3) + 1.0;
        let r = gk15(&mut f, -1.0, 2.0).unwrap();
        // x^7 - 3x^4/4 + x on [-1, 2]
        let exact = (128.0 - 12.0 + 2.0) - (-1.0 - 0.75 - 1.0);
        assert!((r.value - exact).abs() < 1e-12);
    }

    #[test]
    fn weights_sum_to_two() {
        let k: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        let g: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-14);
        assert!((g - 2.0).abs() < 1e-14);
    }
}
