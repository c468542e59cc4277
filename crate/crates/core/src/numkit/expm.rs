use nalgebra::DMatrix;

/// Truncation order of the Taylor series applied to the scaled matrix.
const TAYLOR_ORDER: usize = 12;
/// The scaled matrix has 1-norm at most this value before the series is applied.
const SCALED_NORM: f64 = 0.5;

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(a * t)` by scaling and squaring.
///
/// The argument is divided by `2^s` so that its 1-norm is at most 0.5, the
/// Taylor series is summed to order 12 (Paterson–Stockmeyer) and the result is
/// squared `s` times. At 0.5 the series remainder is below 1e-14.
pub fn mat_exp(a: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    assert!(a.is_square(), "mat_exp needs a square matrix");
    let n = a.nrows();
    let at = a * t;
    let norm = one_norm(&at);
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let scaled = at / 2f64.powi(squarings);

    // Degree-12 Taylor polynomial by Paterson–Stockmeyer in blocks of four:
    // p(A) = B₀ + A⁴ (B₁ + A⁴ (B₂ + c₁₂ A⁴)), Bⱼ = Σᵢ c₄ⱼ₊ᵢ Aⁱ (i < 4).
    // Five matrix products instead of twelve for plain Horner.
    let mut coeff = [1.0f64; TAYLOR_ORDER + 1];
    for k in 1..=TAYLOR_ORDER {
        coeff[k] = coeff[k - 1] / k as f64;
    }
    let mut a2 = DMatrix::<f64>::zeros(n, n);
    let mut a3 = DMatrix::<f64>::zeros(n, n);
    let mut a4 = DMatrix::<f64>::zeros(n, n);
    a2.gemm(1.0, &scaled, &scaled, 0.0);
    a3.gemm(1.0, &a2, &scaled, 0.0);
    a4.gemm(1.0, &a2, &a2, 0.0);
    let fill_block = |b: &mut DMatrix<f64>, j: usize| {
        let c = &coeff[4 * j..4 * j + 4];
        let terms = scaled.iter().zip(a2.iter()).zip(a3.iter());
        for (v, ((x1, x2), x3)) in b.iter_mut().zip(terms) {
            *v = c[1] * x1 + c[2] * x2 + c[3] * x3;
        }
        for i in 0..n {
            b[(i, i)] += c[0];
        }
    };
    let mut result = DMatrix::<f64>::zeros(n, n);
    fill_block(&mut result, 2);
    for (v, x4) in result.iter_mut().zip(a4.iter()) {
        *v += coeff[12] * x4;
    }
    let mut scratch = DMatrix::<f64>::zeros(n, n);
    for j in [1, 0] {
        fill_block(&mut scratch, j);
        scratch.gemm(1.0, &a4, &result, 1.0);
        std::mem::swap(&mut result, &mut scratch);
    }
    for _ in 0..squarings {
        scratch.gemm(1.0, &result, &result, 0.0);
        std::mem::swap(&mut result, &mut scratch);
    }
    result
}
