//! Adaptive order-0 arithmetic coding of octets.
//!
//! The alphabet is the 256 octet values plus an end-of-stream symbol, all
//! starting at count 1.

use super::arith::{AdaptiveModel, ArithDecoder, ArithEncoder};
use crate::error::Result;

const EOS: usize = 256;

pub fn ac_encode(input: &[u8]) -> Vec<u8> {
    let mut model = AdaptiveModel::new(EOS + 1);
    let mut enc = ArithEncoder::new();
    for &b in input {
        model.encode(&mut enc, b as usize);
    }
    model.encode(&mut enc, EOS);
    enc.finish()
}

pub fn ac_decode(payload: &[u8]) -> Result<Vec<u8>> {
    let mut model = AdaptiveModel::new(EOS + 1);
    let mut dec = ArithDecoder::new(payload);
    let mut out = Vec::new();
    loop {
        match model.decode(&mut dec)? {
            EOS => return Ok(out),
            sym => out.push(sym as u8),
        }
    }
}
