use thiserror::Error;

/// Degrees of freedom with tabulated two-sided critical values.
const DF: [f64; 33] = [
    1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 16.0, 17.0, 18.0, 19.0, 20.0,
    21.0, 22.0, 23.0, 24.0, 25.0, 26.0, 27.0, 28.0, 29.0, 30.0, 40.0, 60.0, 120.0,
];

const CRIT_05: [f64; 34] = [
    12.7062, 4.3027, 3.1824, 2.7764, 2.5706, 2.4469, 2.3646, 2.3060, 2.2622, 2.2281, 2.2010, 2.1788, 2.1604, 2.1448,
    2.1314, 2.1199, 2.1098, 2.1009, 2.0930, 2.0860, 2.0796, 2.0739, 2.0687, 2.0639, 2.0595, 2.0555, 2.0518, 2.0484,
    2.0452, 2.0423, 2.0211, 2.0003, 1.9799, 1.9600,
];

const CRIT_01: [f64; 34] = [
    63.6567, 9.9248, 5.8409, 4.6041, 4.0321, 3.7074, 3.4995, 3.3554, 3.2498, 3.1693, 3.1058, 3.0545, 3.0123, 2.9768,
    2.9467, 2.9208, 2.8982, 2.8784, 2.8609, 2.8453, 2.8314, 2.8188, 2.8073, 2.7969, 2.7874, 2.7787, 2.7707, 2.7633,
    2.7564, 2.7500, 2.7045, 2.6603, 2.6174, 2.5758,
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TTestError {
    #[error("sample {sample} has {n} values; at least 2 are needed")]
    TooFewObservations { sample: char, n: usize },
    #[error("no critical values tabulated for alpha {0} (use 0.05 or 0.01)")]
    UnsupportedAlpha(f64),
    #[error("sample {0} contains a non-finite value")]
    NonFinite(char),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    pub alpha: f64,
    pub critical: f64,
    pub significant: bool,
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let ss: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (n - 1.0))
}

/// Two-sided critical value, interpolated linearly in 1/df.
pub fn critical_value(df: f64, alpha: f64) -> Result<f64, TTestError> {
    let table = if (alpha - 0.05).abs() < 1e-12 {
        &CRIT_05
    } else if (alpha - 0.01).abs() < 1e-12 {
        &CRIT_01
    } else {
        return Err(TTestError::UnsupportedAlpha(alpha));
    };
    if !df.is_finite() {
        return Ok(table[33]);
    }
    if df <= 1.0 {
        return Ok(table[0]);
    }
    let inv = 1.0 / df;
    for i in 0..DF.len() {
        let hi_df = DF[i];
        if df == hi_df {
            return Ok(table[i]);
        }
        let (next_inv, next_crit) = if i + 1 < DF.len() {
            (1.0 / DF[i + 1], table[i + 1])
        } else {
            (0.0, table[33])
        };
        let this_inv = 1.0 / hi_df;
        if inv < this_inv && inv >= next_inv {
            let frac = (this_inv - inv) / (this_inv - next_inv);
            return Ok(table[i] + frac * (next_crit - table[i]));
        }
    }
    Ok(table[33])
}

/// Welch's unequal-variance two-sample t-test.
///
/// When both samples have zero variance the statistic is undefined: equal
/// means give t = 0, different means give a signed infinity (always
/// significant). df is then reported as n_a + n_b − 2.
pub fn t_test(a: &[f64], b: &[f64], alpha: f64) -> Result<TTest, TTestError> {
    for (name, s) in [('a', a), ('b', b)] {
        if s.len() < 2 {
            return Err(TTestError::TooFewObservations {
                sample: name,
                n: s.len(),
            });
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(TTestError::NonFinite(name));
        }
    }
    critical_value(1.0, alpha)?;
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let sa = va / na;
    let sb = vb / nb;
    let se2 = sa + sb;
    let (t, df) = if se2 == 0.0 {
        let diff = ma - mb;
        let t = if diff == 0.0 { 0.0 } else { f64::INFINITY.copysign(diff) };
        (t, na + nb - 2.0)
    } else {
        let t = (ma - mb) / se2.sqrt();
        let df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
        (t, df)
    };
    let critical = critical_value(df, alpha)?;
    Ok(TTest {
        t,
        df,
        alpha,
        critical,
        significant: t.abs() > critical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_points_are_exact() {
        assert_eq!(critical_value(10.0, 0.05).unwrap(), 2.2281);
        assert_eq!(critical_value(f64::INFINITY, 0.01).unwrap(), 2.5758);
        assert_eq!(critical_value(120.0, 0.05).unwrap(), 1.9799);
    }

    #[test]
    fn interpolation_is_monotone() {
        let mut prev = f64::INFINITY;
        let mut df = 1.0;
        while df < 1000.0 {
            let c = critical_value(df, 0.05).unwrap();
            assert!(c <= prev + 1e-12);
            prev = c;
            df += 0.37;
        }
        let mid = critical_value(50.0, 0.05).unwrap();
        assert!(mid < 2.0211 && mid > 2.0003);
    }

    #[test]
    fn degenerate_samples() {
        let r = t_test(&[1.0, 1.0], &[1.0, 1.0, 1.0], 0.05).unwrap();
        assert_eq!(r.t, 0.0);
        assert!(!r.significant);
        let r = t_test(&[1.0, 1.0], &[2.0, 2.0], 0.05).unwrap();
        assert_eq!(r.t, f64::NEG_INFINITY);
        assert!(r.significant);
        assert!(matches!(
            t_test(&[1.0], &[1.0, 2.0], 0.05),
            Err(TTestError::TooFewObservations { sample: 'a', n: 1 })
        ));
        assert!(matches!(
            t_test(&[1.0, 2.0], &[1.0, 2.0], 0.1),
            Err(TTestError::UnsupportedAlpha(_))
        ));
    }
}
