use crate::error::Result;
use crate::types::{log2_exact, BitVector};

/// `u * F^{⊗n}` over GF(2) with `F = [[1, 0], [1, 1]]`.
pub fn polar_transform(u: &BitVector) -> Result<BitVector> {
    log2_exact(u.len())?;
    let mut bits = u.to_bits();
    polar_transform_in_place(&mut bits);
    Ok(BitVector::from_bits(&bits))
}

/// In-place butterfly over unpacked bits; `bits.len()` must be a power of two.
pub fn polar_transform_in_place(bits: &mut [u8]) {
    debug_assert!(bits.len().is_power_of_two());
    let n = bits.len();
    let mut half = 1;
    while half < n {
        for block in bits.chunks_exact_mut(2 * half) {
            let (a, b) = block.split_at_mut(half);
            for (x, y) in a.iter_mut().zip(b.iter()) {
                *x ^= *y;
            }
        }
        half *= 2;
    }
}
