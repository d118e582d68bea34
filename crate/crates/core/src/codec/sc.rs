use crate::codec::decoder::{path_metric_update, DecodeResult};
use crate::codec::precode::PcRegister;
use crate::construction::{Allocation, BitRole};
use crate::error::{Error, Result};
use crate::types::BitVector;

const SIGN_BIT: u64 = 1 << 63;

/// Min-sum check-node combination.
#[inline]
pub(crate) fn f_minsum(a: f64, b: f64) -> f64 {
    let (x, y) = (a.abs(), b.abs());
    let m = if x < y { x } else { y };
    // Sign of the product without a branch, so loops vectorise.
    f64::from_bits(m.to_bits() ^ ((a.to_bits() ^ b.to_bits()) & SIGN_BIT))
}

/// Variable-node combination given the left partial sum `u`.
#[inline]
pub(crate) fn g_combine(a: f64, b: f64, u: u8) -> f64 {
    b + f64::from_bits(a.to_bits() ^ (u64::from(u) << 63))
}

struct ScState<'a> {
    roles: &'a [BitRole],
    reg: PcRegister,
    next: usize,
    pm: f64,
    message: Vec<u8>,
}

/// Successive-cancellation decoding. Frozen bits are 0, PC bits take the
/// register prediction, information bits take the hard decision. Returns
/// every information-position bit in ascending index order.
pub fn sc_decode(llr: &[f64], alloc: &Allocation, p: usize) -> Result<DecodeResult> {
    if llr.len() != alloc.n() {
        return Err(Error::LengthMismatch {
            expected: alloc.n(),
            actual: llr.len(),
        });
    }
    let mut st = ScState {
        roles: alloc.roles(),
        reg: PcRegister::new(p)?,
        next: 0,
        pm: 0.0,
        message: Vec::with_capacity(alloc.k()),
    };
    sc_node(llr, &mut st);
    Ok(DecodeResult {
        message: BitVector::from_bits(&st.message),
        selected_path_metric: st.pm,
        pass: true,
        list_dump: None,
    })
}

fn sc_node(llr: &[f64], st: &mut ScState<'_>) -> Vec<u8> {
    if llr.len() == 1 {
        let i = st.next;
        st.next += 1;
        st.reg.rotate();
        let bit = match st.roles[i] {
            BitRole::Frozen => 0,
            BitRole::Parity => st.reg.front(),
            BitRole::Info => {
                let b = u8::from(llr[0] < 0.0);
                st.reg.absorb(b);
                st.message.push(b);
                b
            }
        };
        st.pm = path_metric_update(st.pm, llr[0], bit);
        return vec![bit];
    }
    let half = llr.len() / 2;
    let (a, b) = llr.split_at(half);
    let left_llr: Vec<f64> = a.iter().zip(b).map(|(&x, &y)| f_minsum(x, y)).collect();
    let left = sc_node(&left_llr, st);
    let right_llr: Vec<f64> = a
        .iter()
        .zip(b)
        .zip(&left)
        .map(|((&x, &y), &u)| g_combine(x, y, u))
        .collect();
    let right = sc_node(&right_llr, st);
    let mut out: Vec<u8> = left.iter().zip(&right).map(|(l, r)| l ^ r).collect();
    out.extend_from_slice(&right);
    out
}
