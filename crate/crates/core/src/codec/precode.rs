use crate::construction::{Allocation, BitRole};
use crate::error::{Error, Result};
use crate::types::BitVector;

/// Default parity-check register length.
pub const DEFAULT_PC_REGISTER_LEN: usize = 5;

/// Cyclic shift register holding one parity accumulator per residue class.
///
/// Cells are packed into the low `p` bits of a word, cell 0 in bit 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PcRegister {
    cells: u32,
    p: u32,
}

impl PcRegister {
    pub fn new(p: usize) -> Result<Self> {
        if p == 0 || p > 32 {
            return Err(Error::InvalidConfig(format!(
                "PC register length {p} outside [1, 32]"
            )));
        }
        Ok(Self {
            cells: 0,
            p: p as u32,
        })
    }

    pub fn len(&self) -> usize {
        self.p as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Left rotation: `y[j] <- y[j+1]`, `y[p-1] <- y[0]`.
    #[inline]
    pub fn rotate(&mut self) {
        let front = self.cells & 1;
        self.cells = (self.cells >> 1) | (front << (self.p - 1));
    }

    /// `y[0]`.
    #[inline]
    pub fn front(&self) -> u8 {
        (self.cells & 1) as u8
    }

    /// `y[0] ^= bit`.
    #[inline]
    pub fn absorb(&mut self, bit: u8) {
        self.cells ^= u32::from(bit & 1);
    }

    pub fn cells(&self) -> Vec<u8> {
        (0..self.p).map(|j| ((self.cells >> j) & 1) as u8).collect()
    }
}

/// Map `K` message bits onto the `N`-bit pre-coded vector: information
/// positions carry the message in ascending index order, PC positions carry
/// the register front, frozen positions are zero.
pub fn pc_precode(u: &BitVector, alloc: &Allocation, p: usize) -> Result<BitVector> {
    let mut out = vec![0u8; alloc.n()];
    pc_precode_into(&u.to_bits(), alloc, p, &mut out)?;
    Ok(BitVector::from_bits(&out))
}

pub(crate) fn pc_precode_into(
    u: &[u8],
    alloc: &Allocation,
    p: usize,
    out: &mut [u8],
) -> Result<()> {
    if u.len() != alloc.k() {
        return Err(Error::LengthMismatch {
            expected: alloc.k(),
            actual: u.len(),
        });
    }
    if out.len() != alloc.n() {
        return Err(Error::LengthMismatch {
            expected: alloc.n(),
            actual: out.len(),
        });
    }
    let mut reg = PcRegister::new(p)?;
    let mut k = 0;
    for (i, slot) in out.iter_mut().enumerate() {
        reg.rotate();
        *slot = match alloc.role(i) {
            BitRole::Info => {
                let b = u[k] & 1;
                reg.absorb(b);
                k += 1;
                b
            }
            BitRole::Parity => reg.front(),
            BitRole::Frozen => 0,
        };
    }
    Ok(())
}
