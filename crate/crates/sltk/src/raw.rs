//! The `SLTK` raw frame container: a 16-byte header (`SLTK`, then width,
//! height and fps as little-endian `u32`) followed by packed RGB frames.

use std::io::{self, ErrorKind, Read, Write};
use std::path::{Path, PathBuf};

use sltk_core::Frame;

use crate::error::{Error, IoContext, Result};

pub const MAGIC: [u8; 4] = *b"SLTK";
pub const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RawHeader {
    pub width: u32,
    pub height: u32,
    pub fps: u32,
}

impl RawHeader {
    pub fn frame_len(&self) -> usize {
        self.width as usize * self.height as usize * 3
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[..4].copy_from_slice(&MAGIC);
        out[4..8].copy_from_slice(&self.width.to_le_bytes());
        out[8..12].copy_from_slice(&self.height.to_le_bytes());
        out[12..].copy_from_slice(&self.fps.to_le_bytes());
        out
    }

    pub fn parse(bytes: &[u8; HEADER_LEN], path: &Path) -> Result<Self> {
        let malformed = |offset, reason| Error::MalformedHeader {
            path: path.to_path_buf(),
            offset,
            reason,
        };
        if bytes[..4] != MAGIC {
            return Err(malformed(0, "expected magic SLTK"));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
        let header = Self {
            width: word(4),
            height: word(8),
            fps: word(12),
        };
        if header.width < 3 || header.height < 3 {
            return Err(malformed(4, "frame must be at least 3x3"));
        }
        if header.fps == 0 {
            return Err(malformed(12, "fps must be positive"));
        }
        Ok(header)
    }
}

/// Reads as many bytes as are available into `buf`, stopping only at EOF.
fn fill(reader: &mut impl Read, buf: &mut [u8]) -> io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match reader.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

/// Streaming reader yielding frames with timestamps `index * 1000 / fps`.
#[derive(Debug)]
pub struct RawReader<R> {
    reader: R,
    path: PathBuf,
    header: RawHeader,
    index: u64,
    done: bool,
}

impl<R: Read> RawReader<R> {
    pub fn new(mut reader: R, path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let mut bytes = [0u8; HEADER_LEN];
        let n = fill(&mut reader, &mut bytes).at(&path)?;
        if n < HEADER_LEN {
            return Err(Error::MalformedHeader {
                path,
                offset: n as u64,
                reason: "file ends inside the 16-byte header",
            });
        }
        let header = RawHeader::parse(&bytes, &path)?;
        Ok(Self {
            reader,
            path,
            header,
            index: 0,
            done: false,
        })
    }

    pub fn header(&self) -> RawHeader {
        self.header
    }
}

impl<R: Read> Iterator for RawReader<R> {
    type Item = Result<Frame>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let len = self.header.frame_len();
        let offset = HEADER_LEN as u64 + self.index * len as u64;
        let mut buf = vec![0u8; len];
        let n = match fill(&mut self.reader, &mut buf).at(&self.path) {
            Ok(n) => n,
            Err(e) => {
                self.done = true;
                return Some(Err(e));
            }
        };
        if n == 0 {
            self.done = true;
            return None;
        }
        if n < len {
            self.done = true;
            return Some(Err(Error::TruncatedFrame {
                path: self.path.clone(),
                offset,
            }));
        }
        let t = self.index * 1000 / u64::from(self.header.fps);
        self.index += 1;
        let (w, h) = (self.header.width as usize, self.header.height as usize);
        Some(Frame::from_bytes(w, h, &buf, t).map_err(Error::from))
    }
}

#[derive(Debug)]
pub struct RawWriter<W> {
    writer: W,
    header: RawHeader,
    path: PathBuf,
}

impl<W: Write> RawWriter<W> {
    pub fn new(mut writer: W, header: RawHeader, path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        writer.write_all(&header.to_bytes()).at(&path)?;
        Ok(Self {
            writer,
            header,
            path,
        })
    }

    pub fn write(&mut self, frame: &Frame) -> Result<()> {
        let expected = (self.header.width as usize, self.header.height as usize);
        if frame.dims() != expected {
            return Err(Error::DimensionMismatch {
                path: self.path.clone(),
                expected,
                actual: frame.dims(),
            });
        }
        self.writer.write_all(&frame.to_bytes()).at(&self.path)
    }

    pub fn finish(mut self) -> Result<W> {
        self.writer.flush().at(&self.path)?;
        Ok(self.writer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream(k: usize, extra: usize) -> Vec<u8> {
        let header = RawHeader {
            width: 320,
            height: 240,
            fps: 30,
        };
        let mut bytes = header.to_bytes().to_vec();
        bytes.resize(HEADER_LEN + 230_400 * k + extra, 9);
        bytes
    }

    #[test]
    fn counts_frames() {
        for k in [0, 1, 3] {
            let frames: Vec<_> = RawReader::new(&stream(k, 0)[..], "s")
                .unwrap()
                .collect::<Result<_>>()
                .unwrap();
            assert_eq!(frames.len(), k);
            let ts: Vec<u64> = frames.iter().map(|f| f.timestamp_ms).collect();
            assert_eq!(ts, [0, 33, 66][..k]);
        }
    }

    #[test]
    fn truncated_frame_names_offset() {
        let bytes = stream(2, 100);
        let mut frames = RawReader::new(&bytes[..], "cut.sltk").unwrap();
        assert!(frames.next().unwrap().is_ok());
        assert!(frames.next().unwrap().is_ok());
        match frames.next() {
            Some(Err(Error::TruncatedFrame { offset, .. })) => assert_eq!(offset, 16 + 2 * 230_400),
            other => panic!("{other:?}"),
        }
        assert!(frames.next().is_none());
    }

    #[test]
    fn bad_headers() {
        assert!(matches!(
            RawReader::new(&b"SLTK\x03\0\0\0"[..], "h"),
            Err(Error::MalformedHeader { offset: 8, .. })
        ));
        let mut bytes = stream(0, 0);
        bytes[0] = b'X';
        assert!(matches!(
            RawReader::new(&bytes[..], "h"),
            Err(Error::MalformedHeader { offset: 0, .. })
        ));
    }

    #[test]
    fn writer_checks_dimensions() {
        let header = RawHeader {
            width: 4,
            height: 3,
            fps: 10,
        };
        let mut w = RawWriter::new(Vec::new(), header, "out").unwrap();
        let f = Frame::from_fn(4, 3, |x, y| [x as u8, y as u8, 1]).unwrap();
        w.write(&f).unwrap();
        assert!(w.write(&Frame::filled(3, 3, [0; 3]).unwrap()).is_err());
        let bytes = w.finish().unwrap();
        assert_eq!(bytes.len(), 16 + 36);
        let back: Vec<_> = RawReader::new(&bytes[..], "out")
            .unwrap()
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(back, [f]);
    }
}
