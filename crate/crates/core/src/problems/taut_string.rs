use crate::error::{Error, Result};
use crate::vector::Vector;

/// Exact minimizer of `1/2 ||u - b||^2 + lambda sum_i |u_{i+1} - u_i|`.
///
/// Direct taut-string scan: the solution is built segment by segment by
/// tracking the tube `[b - lambda, b + lambda]` around the running sums,
/// with linear cost in the typical case.
pub fn taut_string_tv(b: &Vector, lambda: f64) -> Result<Vector> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(
            "lambda",
            format!("must be finite and >= 0, got {lambda}"),
        ));
    }
    let input = b.as_slice();
    let width = input.len();
    if width == 0 || lambda == 0.0 {
        return Ok(b.clone());
    }
    let mut out = vec![0.0; width];
    let two_lambda = 2.0 * lambda;
    let (mut k, mut k0, mut kplus, mut kminus) = (0usize, 0usize, 0usize, 0usize);
    let (mut umin, mut umax) = (lambda, -lambda);
    let (mut vmin, mut vmax) = (input[0] - lambda, input[0] + lambda);
    loop {
        while k == width - 1 {
            if umin < 0.0 {
                while k0 <= kminus {
                    out[k0] = vmin;
                    k0 += 1;
                }
                k = k0;
                kminus = k0;
                vmin = input[k0];
                umin = lambda;
                umax = vmin + umin - vmax;
            } else if umax > 0.0 {
                while k0 <= kplus {
                    out[k0] = vmax;
                    k0 += 1;
                }
                k = k0;
                kplus = k0;
                vmax = input[k0];
                umax = -lambda;
                umin = vmax + umax - vmin;
            } else {
                vmin += umin / (k - k0 + 1) as f64;
                while k0 <= k {
                    out[k0] = vmin;
                    k0 += 1;
                }
                return Ok(Vector::from_vec_unchecked(out));
            }
        }
        umin += input[k + 1] - vmin;
        if umin < -lambda {
            while k0 <= kminus {
                out[k0] = vmin;
                k0 += 1;
            }
            k = k0;
            kplus = k0;
            kminus = k0;
            vmin = input[k0];
            vmax = vmin + two_lambda;
            umin = lambda;
            umax = -lambda;
            continue;
        }
        umax += input[k + 1] - vmax;
        if umax > lambda {
            while k0 <= kplus {
                out[k0] = vmax;
                k0 += 1;
            }
            k = k0;
            kplus = k0;
            kminus = k0;
            vmax = input[k0];
            vmin = vmax - two_lambda;
            umin = lambda;
            umax = -lambda;
            continue;
        }
        k += 1;
        if umin >= lambda {
            kminus = k;
            vmin += (umin - lambda) / (kminus - k0 + 1) as f64;
            umin = lambda;
        }
        if umax <= -lambda {
            kplus = k;
            vmax += (umax + lambda) / (kplus - k0 + 1) as f64;
            umax = -lambda;
        }
    }
}

/// `sum_i |u_{i+1} - u_i|`
pub fn total_variation(u: &Vector) -> f64 {
    u.as_slice().windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}
