//! Basis-state conventions shared by every module.
//!
//! Variable 0 (qubit 1) is the most significant bit of a basis index. Bit value
//! 0 is spin `+1` (binary `x = 0`), bit value 1 is spin `-1` (binary `x = 1`), so
//! the printed bitstring of a basis index reads `x_1 x_2 ... x_N` left to right.

/// Bit of variable `var` in basis index `index` of an `n`-variable register.
#[inline]
pub fn bit(index: u64, var: usize, n: usize) -> bool {
    (index >> (n - 1 - var)) & 1 == 1
}

#[inline]
pub fn spin(index: u64, var: usize, n: usize) -> i8 {
    if bit(index, var, n) {
        -1
    } else {
        1
    }
}

pub fn index_to_bits(index: u64, n: usize) -> Vec<bool> {
    (0..n).map(|v| bit(index, v, n)).collect()
}

pub fn bits_to_index(bits: &[bool]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
}

pub fn index_to_bitstring(index: u64, n: usize) -> String {
    (0..n)
        .map(|v| if bit(index, v, n) { '1' } else { '0' })
        .collect()
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Parses a `0`/`1` string; returns `None` on any other character.
pub fn parse_bitstring(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

pub fn spins_to_index(spins: &[i8]) -> u64 {
    spins.iter().fold(0u64, |acc, &z| (acc << 1) | (z < 0) as u64)
}

pub fn index_to_spins(index: u64, n: usize) -> Vec<i8> {
    (0..n).map(|v| spin(index, v, n)).collect()
}
