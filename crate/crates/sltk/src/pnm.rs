//! Binary portable pixmap (P6) and graymap (P5) files, maxval 255 only.

use std::fs;
use std::path::Path;

use sltk_core::{Frame, GrayImage};

use crate::error::{Error, IoContext, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub magic: [u8; 2],
    pub width: usize,
    pub height: usize,
    pub maxval: u32,
    /// Offset of the first sample byte.
    pub data_offset: usize,
}

impl Header {
    pub fn channels(&self) -> usize {
        if &self.magic == b"P6" {
            3
        } else {
            1
        }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl Cursor<'_> {
    fn malformed(&self, reason: &'static str) -> Error {
        Error::MalformedHeader {
            path: self.path.to_path_buf(),
            offset: self.pos as u64,
            reason,
        }
    }

    fn skip_blank(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Result<u32> {
        self.skip_blank();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.malformed("expected a decimal number"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.malformed("number out of range"))
    }
}

pub fn parse_header(bytes: &[u8], path: &Path) -> Result<Header> {
    let mut c = Cursor {
        bytes,
        pos: 0,
        path,
    };
    let magic = match bytes.get(..2) {
        Some(b"P6") => *b"P6",
        Some(b"P5") => *b"P5",
        _ => return Err(c.malformed("expected magic P6 or P5")),
    };
    c.pos = 2;
    let width = c.number()? as usize;
    let height = c.number()? as usize;
    let maxval = c.number()?;
    if !bytes.get(c.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(c.malformed("expected whitespace after maxval"));
    }
    if maxval != 255 {
        return Err(Error::UnsupportedMaxval {
            path: path.to_path_buf(),
            maxval,
        });
    }
    Ok(Header {
        magic,
        width,
        height,
        maxval,
        data_offset: c.pos + 1,
    })
}

fn samples<'a>(bytes: &'a [u8], header: &Header, path: &Path) -> Result<&'a [u8]> {
    let len = header.width * header.height * header.channels();
    bytes
        .get(header.data_offset..header.data_offset + len)
        .ok_or_else(|| Error::TruncatedFrame {
            path: path.to_path_buf(),
            offset: bytes.len() as u64,
        })
}

pub fn decode_ppm(bytes: &[u8], path: &Path, timestamp_ms: u64) -> Result<Frame> {
    let header = parse_header(bytes, path)?;
    if header.channels() != 3 {
        return Err(Error::MalformedHeader {
            path: path.to_path_buf(),
            offset: 0,
            reason: "expected a P6 pixmap",
        });
    }
    let data = samples(bytes, &header, path)?;
    Ok(Frame::from_bytes(
        header.width,
        header.height,
        data,
        timestamp_ms,
    )?)
}

/// Reads a graymap, or a pixmap converted to luma.
pub fn decode_gray(bytes: &[u8], path: &Path) -> Result<GrayImage> {
    let header = parse_header(bytes, path)?;
    if header.channels() == 3 {
        return Ok(sltk_core::pipeline::to_gray(&decode_ppm(bytes, path, 0)?));
    }
    let data = samples(bytes, &header, path)?;
    Ok(GrayImage::new(header.width, header.height, data.to_vec())?)
}

pub fn read_ppm(path: &Path, timestamp_ms: u64) -> Result<Frame> {
    decode_ppm(&fs::read(path).at(path)?, path, timestamp_ms)
}

pub fn read_gray(path: &Path) -> Result<GrayImage> {
    decode_gray(&fs::read(path).at(path)?, path)
}

pub fn encode_ppm(frame: &Frame) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", frame.width(), frame.height()).into_bytes();
    out.extend(frame.to_bytes());
    out
}

pub fn encode_pgm(width: usize, height: usize, values: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(values);
    out
}

pub fn write_ppm(path: &Path, frame: &Frame) -> Result<()> {
    fs::write(path, encode_ppm(frame)).at(path)
}

pub fn write_pgm(path: &Path, width: usize, height: usize, values: &[u8]) -> Result<()> {
    fs::write(path, encode_pgm(width, height, values)).at(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let f = Frame::from_fn(5, 4, |x, y| [x as u8, y as u8, 7]).unwrap();
        let bytes = encode_ppm(&f);
        assert_eq!(decode_ppm(&bytes, Path::new("t.ppm"), 0).unwrap(), f);
    }

    #[test]
    fn comments_and_whitespace() {
        let mut bytes = b"P5 # gray\n# size next\n 3\t3\n255\n".to_vec();
        bytes.extend(0..9u8);
        let g = decode_gray(&bytes, Path::new("t.pgm")).unwrap();
        assert_eq!(g.values(), &[0, 1, 2, 3, 4, 5, 6, 7, 8]);
    }

    #[test]
    fn rejects_wide_samples() {
        let mut bytes = b"P6\n3 3\n65535\n".to_vec();
        bytes.extend([0u8; 54]);
        let err = decode_ppm(&bytes, Path::new("deep.ppm"), 0).unwrap_err();
        assert!(
            matches!(err, Error::UnsupportedMaxval { maxval: 65535, .. }),
            "{err}"
        );
        assert!(err.to_string().contains("deep.ppm"));
    }

    #[test]
    fn rejects_truncation_and_bad_magic() {
        let bytes = b"P6\n3 3\n255\n\x01\x02".to_vec();
        assert!(matches!(
            decode_ppm(&bytes, Path::new("t"), 0),
            Err(Error::TruncatedFrame { .. })
        ));
        assert!(matches!(
            decode_ppm(b"P3\n3 3\n255\n", Path::new("t"), 0),
            Err(Error::MalformedHeader { offset: 0, .. })
        ));
        assert!(matches!(
            decode_ppm(b"P6\n3 x\n255\n", Path::new("t"), 0),
            Err(Error::MalformedHeader { offset: 5, .. })
        ));
    }
}
