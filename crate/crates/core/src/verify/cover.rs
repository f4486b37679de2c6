// SPDX-License-Identifier: Apache-2.0

//! Pairwise orthogonality of product terms over the valid codewords of a
//! full adder's three dual-rail inputs.

use crate::adder::full_adder_covers;

use super::VerifyError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjointWitness {
    /// Indices of the two overlapping products.
    pub first: usize,
    pub second: usize,
    /// A codeword satisfying both.
    pub a: bool,
    pub b: bool,
    pub cin: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjointReport {
    pub disjoint: bool,
    pub witness: Option<DisjointWitness>,
}

/// Variable index and required value of one rail literal.
fn parse_literal(lit: &str) -> Result<(usize, bool), VerifyError> {
    let bad = || VerifyError::UnknownLiteral(lit.to_string());
    let (var, rail) = lit.split_at(lit.len().checked_sub(1).ok_or_else(bad)?);
    let var = match var.to_ascii_uppercase().as_str() {
        "A" => 0,
        "B" => 1,
        "CIN" => 2,
        _ => return Err(bad()),
    };
    match rail {
        "1" => Ok((var, true)),
        "0" => Ok((var, false)),
        _ => Err(bad()),
    }
}

/// Set of codewords (bit `a<<2 | b<<1 | cin`) satisfying a product.
fn satisfying(product: &[impl AsRef<str>]) -> Result<u8, VerifyError> {
    let mut set = 0xffu8;
    for lit in product {
        let (var, value) = parse_literal(lit.as_ref())?;
        let shift = 2 - var;
        set &= (0..8u8)
            .filter(|w| (w >> shift & 1 == 1) == value)
            .fold(0, |m, w| m | 1 << w);
    }
    Ok(set)
}

/// Checks that no codeword satisfies two of `products`. Literals are rail
/// names such as `A1`, `B0` or `CIN1`.
pub fn check_disjoint_cover<P, S>(products: &[P]) -> Result<DisjointReport, VerifyError>
where
    P: AsRef<[S]>,
    S: AsRef<str>,
{
    let sets = products
        .iter()
        .map(|p| satisfying(p.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let both = sets[i] & sets[j];
            if both != 0 {
                let w = both.trailing_zeros() as u8;
                return Ok(DisjointReport {
                    disjoint: false,
                    witness: Some(DisjointWitness {
                        first: i,
                        second: j,
                        a: w >> 2 & 1 == 1,
                        b: w >> 1 & 1 == 1,
                        cin: w & 1 == 1,
                    }),
                });
            }
        }
    }
    Ok(DisjointReport {
        disjoint: true,
        witness: None,
    })
}

/// Products of the four full-adder output covers, keyed by output rail.
pub fn cover_products() -> Vec<(&'static str, Vec<Vec<String>>)> {
    full_adder_covers()
        .into_iter()
        .map(|c| (c.name, c.minterms.iter().map(|m| m.literals().to_vec()).collect()))
        .collect()
}
