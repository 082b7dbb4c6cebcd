//! Bijective S-box values, the swap mutation and component Boolean functions.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

pub const MIN_BITS: u32 = 3;
pub const MAX_BITS: u32 = 8;

/// The AES SubBytes table.
pub const AES_SUBBYTES: [u8; 256] = [
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,
];

fn check_width(n: u32) -> Result<()> {
    if (MIN_BITS..=MAX_BITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedWidth(n))
    }
}

/// A bijective `n`-bit S-box stored as its lookup table.
///
/// Every constructor validates that the table is a permutation of
/// `0..2^n`, and no operation can break that afterwards.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SBox {
    n: u32,
    table: Vec<u8>,
}

impl SBox {
    /// Builds an S-box from an explicit table, rejecting anything that is
    /// not a permutation of `0..2^n`.
    pub fn from_table<T>(n: u32, values: &[T]) -> Result<SBox>
    where
        T: Copy + Into<u64>,
    {
        check_width(n)?;
        let size = 1usize << n;
        if values.len() != size {
            return Err(Error::LengthMismatch {
                expected: size,
                found: values.len(),
            });
        }
        let mut seen = vec![false; size];
        let mut table = Vec::with_capacity(size);
        for (position, &v) in values.iter().enumerate() {
            let value: u64 = v.into();
            if value >= size as u64 {
                return Err(Error::ValueOutOfRange { position, value, n });
            }
            if std::mem::replace(&mut seen[value as usize], true) {
                return Err(Error::NotBijective { value });
            }
            table.push(value as u8);
        }
        Ok(SBox { n, table })
    }

    pub fn identity(n: u32) -> Result<SBox> {
        check_width(n)?;
        Ok(SBox {
            n,
            table: (0..1usize << n).map(|x| x as u8).collect(),
        })
    }

    pub fn aes() -> SBox {
        SBox {
            n: 8,
            table: AES_SUBBYTES.to_vec(),
        }
    }

    /// A uniformly random permutation drawn with a Fisher-Yates shuffle.
    pub fn random<R: Rng + ?Sized>(n: u32, rng: &mut R) -> Result<SBox> {
        let mut s = SBox::identity(n)?;
        s.table.shuffle(rng);
        Ok(s)
    }

    pub fn bits(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: usize) -> u8 {
        self.table[x]
    }

    /// Returns a copy with entries `i` and `j` exchanged.
    pub fn swapped(&self, i: usize, j: usize) -> Result<SBox> {
        let len = self.table.len();
        for index in [i, j] {
            if index >= len {
                return Err(Error::IndexOutOfRange { index, len });
            }
        }
        if i == j {
            return Err(Error::IdenticalIndices(i));
        }
        let mut out = self.clone();
        out.table.swap(i, j);
        Ok(out)
    }

    /// Applies one transposition at two distinct uniformly drawn positions.
    /// The second index is redrawn until it differs from the first.
    pub fn mutate<R: Rng + ?Sized>(&self, rng: &mut R) -> SBox {
        let (i, j) = distinct_pair(self.table.len(), rng);
        let mut out = self.clone();
        out.table.swap(i, j);
        out
    }

    /// The component function `x -> b . S(x)`.
    pub fn component(&self, b: u32) -> Result<TruthTable> {
        if b == 0 {
            return Err(Error::ZeroSelector);
        }
        if b >= 1 << self.n {
            return Err(Error::IndexOutOfRange {
                index: b as usize,
                len: self.table.len(),
            });
        }
        let bits = self
            .table
            .iter()
            .map(|&y| (u32::from(y) & b).count_ones() & 1 == 1)
            .collect();
        Ok(TruthTable { n: self.n, bits })
    }

    /// Serializes to the text format: `n` on the first line, then the table
    /// as two-digit lowercase hex, sixteen values per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for row in self.table.chunks(16) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:02x}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Strict parser for [`SBox::to_text`] output.
    ///
    /// The table may be followed by a blank line and a block of `key=value`
    /// lines (as written by the `generate` command); anything else after the
    /// table is rejected.
    pub fn from_text(text: &str) -> Result<SBox> {
        let parse_err = |line: usize, msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };
        let mut lines: Vec<&str> = text.split('\n').collect();
        if lines.last() == Some(&"") {
            lines.pop();
        }
        let header = *lines.first().ok_or_else(|| parse_err(1, "empty input"))?;
        if header.is_empty() || !header.bytes().all(|c| c.is_ascii_digit()) {
            return Err(parse_err(1, "expected the bit width as a decimal integer"));
        }
        let n: u32 = header
            .parse()
            .map_err(|_| parse_err(1, "bit width is not a number"))?;
        check_width(n).map_err(|e| parse_err(1, &e.to_string()))?;
        let size = 1usize << n;
        let rows = size.div_ceil(16);
        if lines.len() < 1 + rows {
            return Err(parse_err(lines.len() + 1, "table is truncated"));
        }
        let mut values = Vec::with_capacity(size);
        for (r, line) in lines[1..=rows].iter().enumerate() {
            let line_no = r + 2;
            let want = (size - 16 * r).min(16);
            let tokens: Vec<&str> = line.split(' ').collect();
            if tokens.len() != want {
                return Err(parse_err(
                    line_no,
                    &format!("expected {want} values, found {}", tokens.len()),
                ));
            }
            for tok in tokens {
                let ok = tok.len() == 2 && tok.bytes().all(|c| matches!(c, b'0'..=b'9' | b'a'..=b'f'));
                if !ok {
                    return Err(parse_err(line_no, &format!("bad hex value {tok:?}")));
                }
                values.push(u8::from_str_radix(tok, 16).expect("validated hex"));
            }
        }
        let trailer = &lines[1 + rows..];
        if let Some((first, rest)) = trailer.split_first() {
            if !first.is_empty() {
                return Err(parse_err(rows + 2, "unexpected content after table"));
            }
            for (k, line) in rest.iter().enumerate() {
                let valid = line
                    .split_once('=')
                    .is_some_and(|(key, _)| !key.is_empty() && !key.contains(' '));
                if !valid {
                    return Err(parse_err(rows + 3 + k, "expected key=value"));
                }
            }
        }
        SBox::from_table(n, &values)
    }
}

impl fmt::Display for SBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub(crate) fn distinct_pair<R: Rng + ?Sized>(len: usize, rng: &mut R) -> (usize, usize) {
    let i = rng.gen_range(0..len);
    let mut j = rng.gen_range(0..len);
    while j == i {
        j = rng.gen_range(0..len);
    }
    (i, j)
}

/// A Boolean function on `n` variables given by its values at `0..2^n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruthTable {
    n: u32,
    bits: Vec<bool>,
}

impl TruthTable {
    pub fn new(n: u32, bits: Vec<bool>) -> Result<TruthTable> {
        if n > 16 {
            return Err(Error::UnsupportedWidth(n));
        }
        if bits.len() != 1 << n {
            return Err(Error::LengthMismatch {
                expected: 1 << n,
                found: bits.len(),
            });
        }
        Ok(TruthTable { n, bits })
    }

    pub fn from_fn(n: u32, f: impl Fn(usize) -> bool) -> TruthTable {
        TruthTable {
            n,
            bits: (0..1usize << n).map(f).collect(),
        }
    }

    pub fn bits_len(&self) -> u32 {
        self.n
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize) -> bool {
        self.bits[x]
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}
