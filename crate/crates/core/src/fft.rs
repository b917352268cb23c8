//! Iterative radix-2 FFT and the 64-point helpers used by the equalizer.

use std::f64::consts::PI;

use crate::signal::{ComplexSample, SYMBOL_LEN};

/// In-place forward FFT (unnormalized, `e^{-j2πkn/N}` kernel).
///
/// Panics if the length is not a power of two.
pub fn fft_in_place(buf: &mut [ComplexSample]) {
    transform(buf, false);
}

/// In-place inverse FFT including the `1/N` factor.
pub fn ifft_in_place(buf: &mut [ComplexSample]) {
    transform(buf, true);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

fn transform(buf: &mut [ComplexSample], inverse: bool) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "FFT length {n} is not a power of two");
    if n <= 1 {
        return;
    }

    // bit-reversal permutation
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            buf.swap(i, j);
        }
    }

    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = sign * 2.0 * PI / len as f64;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                // twiddles from the exact angle, not a running product, so error stays at a few ulps
                let w = ComplexSample::from_polar(1.0, step * k as f64);
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

/// Reorder natural DFT output (bin 0 first) into centered subcarrier order
/// (subcarrier -32 first, DC at 1-based position 33).
pub fn to_centered(natural: &[ComplexSample; SYMBOL_LEN]) -> [ComplexSample; SYMBOL_LEN] {
    let mut out = [ComplexSample::new(0.0, 0.0); SYMBOL_LEN];
    for (p, o) in out.iter_mut().enumerate() {
        *o = natural[(p + SYMBOL_LEN / 2) % SYMBOL_LEN];
    }
    out
}

/// Inverse of [`to_centered`].
pub fn from_centered(centered: &[ComplexSample; SYMBOL_LEN]) -> [ComplexSample; SYMBOL_LEN] {
    let mut out = [ComplexSample::new(0.0, 0.0); SYMBOL_LEN];
    for (p, &c) in centered.iter().enumerate() {
        out[(p + SYMBOL_LEN / 2) % SYMBOL_LEN] = c;
    }
    out
}

/// Unnormalized 64-point forward DFT, returned in centered subcarrier order.
///
/// Panics if `x.len() != 64`.
pub fn dft64(x: &[ComplexSample]) -> [ComplexSample; SYMBOL_LEN] {
    let mut buf: [ComplexSample; SYMBOL_LEN] = x
        .try_into()
        .unwrap_or_else(|_| panic!("dft64 expects 64 samples, got {}", x.len()));
    fft_in_place(&mut buf);
    to_centered(&buf)
}

/// Inverse of [`dft64`]: centered-order spectrum to time samples (with `1/64`).
pub fn idft64(centered: &[ComplexSample; SYMBOL_LEN]) -> [ComplexSample; SYMBOL_LEN] {
    let mut buf = from_centered(centered);
    ifft_in_place(&mut buf);
    buf
}
