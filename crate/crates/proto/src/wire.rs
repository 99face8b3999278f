//! Low-level wire primitives: big-endian integers, length-prefixed strings,
//! comma-separated name-lists and mpint encoding.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum WireError {
    #[error("unexpected end of input reading {0}")]
    Truncated(&'static str),
    #[error("trailing bytes after message body")]
    TrailingBytes,
    #[error("string length {0} exceeds remaining input")]
    BadStringLength(u32),
    #[error("name-list entry contains a comma or is not printable ASCII")]
    BadName,
    #[error("name-list is not valid ASCII")]
    NonAsciiNameList,
}

pub type WireResult<T> = Result<T, WireError>;

/// Append-only writer for wire encodings.
#[derive(Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }

    pub fn put_u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn put_bool(&mut self, v: bool) {
        self.buf.push(u8::from(v));
    }

    pub fn put_u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_be_bytes());
    }

    pub fn put_raw(&mut self, bytes: &[u8]) {
        self.buf.extend_from_slice(bytes);
    }

    /// u32 length prefix followed by the bytes.
    pub fn put_string(&mut self, bytes: &[u8]) {
        self.put_u32(bytes.len() as u32);
        self.put_raw(bytes);
    }

    pub fn put_name_list(&mut self, names: &[String]) -> WireResult<()> {
        self.put_string(&encode_name_list(names)?);
        Ok(())
    }

    /// Multiple-precision integer in two's complement, minimal length,
    /// with a leading zero byte when the high bit would be set.
    pub fn put_mpint(&mut self, magnitude_be: &[u8]) {
        let mut m = magnitude_be;
        while !m.is_empty() && m[0] == 0 {
            m = &m[1..];
        }
        if m.is_empty() {
            self.put_u32(0);
        } else if m[0] & 0x80 != 0 {
            self.put_u32(m.len() as u32 + 1);
            self.put_u8(0);
            self.put_raw(m);
        } else {
            self.put_string(m);
        }
    }
}

/// Encode a positive big-endian magnitude as a standalone mpint blob.
pub fn encode_mpint(magnitude_be: &[u8]) -> Vec<u8> {
    let mut w = Writer::new();
    w.put_mpint(magnitude_be);
    w.into_bytes()
}

/// Consuming reader over a wire-encoded buffer.
pub struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf }
    }

    pub fn remaining(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn finish(&self) -> WireResult<()> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(WireError::TrailingBytes)
        }
    }

    pub fn take(&mut self, n: usize, what: &'static str) -> WireResult<&'a [u8]> {
        if self.buf.len() < n {
            return Err(WireError::Truncated(what));
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }

    pub fn take_rest(&mut self) -> &'a [u8] {
        let rest = self.buf;
        self.buf = &[];
        rest
    }

    pub fn get_u8(&mut self, what: &'static str) -> WireResult<u8> {
        Ok(self.take(1, what)?[0])
    }

    pub fn get_bool(&mut self, what: &'static str) -> WireResult<bool> {
        Ok(self.get_u8(what)? != 0)
    }

    pub fn get_u32(&mut self, what: &'static str) -> WireResult<u32> {
        let b = self.take(4, what)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn get_string(&mut self, what: &'static str) -> WireResult<&'a [u8]> {
        let len = self.get_u32(what)?;
        if self.buf.len() < len as usize {
            return Err(WireError::BadStringLength(len));
        }
        self.take(len as usize, what)
    }

    pub fn get_name_list(&mut self, what: &'static str) -> WireResult<Vec<String>> {
        decode_name_list(self.get_string(what)?)
    }

    /// Returns the magnitude bytes (possibly with one leading zero).
    pub fn get_mpint(&mut self, what: &'static str) -> WireResult<&'a [u8]> {
        self.get_string(what)
    }
}

/// Comma-joined name-list body (without the u32 prefix).
pub fn encode_name_list(names: &[String]) -> WireResult<Vec<u8>> {
    for n in names {
        if n.contains(',') || !n.is_ascii() || n.is_empty() {
            return Err(WireError::BadName);
        }
    }
    Ok(names.join(",").into_bytes())
}

pub fn decode_name_list(body: &[u8]) -> WireResult<Vec<String>> {
    if body.is_empty() {
        return Ok(Vec::new());
    }
    let s = std::str::from_utf8(body).map_err(|_| WireError::NonAsciiNameList)?;
    if !s.is_ascii() {
        return Err(WireError::NonAsciiNameList);
    }
    Ok(s.split(',').map(str::to_owned).collect())
}
