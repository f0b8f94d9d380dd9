//! Frame sources and the read-ahead ingestion thread.

use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::mpsc::{sync_channel, Receiver};
use std::thread::{self, JoinHandle};

use sltk_core::scene::{render_frame, SceneScript};
use sltk_core::Frame;

use crate::error::{Error, IoContext, Result};
use crate::pnm;
use crate::raw::RawReader;

/// Frames buffered ahead of the consumer.
pub const QUEUE_DEPTH: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum FrameSource {
    /// Numbered P6 files, read in file name order.
    Directory {
        path: PathBuf,
        fps: u32,
    },
    /// An `SLTK` raw stream; `fps` overrides the header rate when set.
    Raw {
        path: PathBuf,
        fps: Option<u32>,
    },
    Scene(Box<SceneScript>),
}

impl FrameSource {
    pub fn fps(&self) -> Option<u32> {
        match self {
            FrameSource::Directory { fps, .. } => Some(*fps),
            FrameSource::Raw { fps, .. } => *fps,
            FrameSource::Scene(s) => Some(s.fps),
        }
    }
}

/// Sorted `.ppm` files of a frame directory.
pub fn frame_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).at(dir)? {
        let path = entry.at(dir)?.path();
        if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("ppm"))
        {
            files.push(path);
        }
    }
    if files.is_empty() {
        return Err(Error::EmptyDirectory {
            path: dir.to_path_buf(),
        });
    }
    files.sort();
    Ok(files)
}

fn timestamp(index: usize, fps: u32) -> u64 {
    index as u64 * 1000 / u64::from(fps)
}

fn bad_fps() -> Error {
    sltk_core::Error::InvalidConfig("fps must be positive").into()
}

/// Boxed iterator over a source, on the calling thread.
pub fn frames_iter(source: FrameSource) -> Result<Box<dyn Iterator<Item = Result<Frame>> + Send>> {
    match source {
        FrameSource::Directory { path, fps } => {
            if fps == 0 {
                return Err(bad_fps());
            }
            let files = frame_files(&path)?;
            let mut dims = None;
            Ok(Box::new(files.into_iter().enumerate().map(
                move |(i, file)| {
                    let frame = pnm::read_ppm(&file, timestamp(i, fps))?;
                    let expected = *dims.get_or_insert(frame.dims());
                    if frame.dims() != expected {
                        return Err(Error::DimensionMismatch {
                            path: file,
                            expected,
                            actual: frame.dims(),
                        });
                    }
                    Ok(frame)
                },
            )))
        }
        FrameSource::Raw { path, fps } => {
            let file = File::open(&path).at(&path)?;
            let reader = RawReader::new(BufReader::new(file), &path)?;
            match fps {
                None => Ok(Box::new(reader)),
                Some(0) => Err(bad_fps()),
                Some(fps) => {
                    Ok(Box::new(reader.enumerate().map(move |(i, f)| {
                        f.map(|f| f.with_timestamp(timestamp(i, fps)))
                    })))
                }
            }
        }
        FrameSource::Scene(script) => {
            script.validate()?;
            Ok(Box::new(
                (0..script.frames).map(move |i| Ok(render_frame(&script, i).0)),
            ))
        }
    }
}

/// Frames delivered in order by a reader thread through a bounded queue.
#[derive(Debug)]
pub struct FrameStream {
    rx: Receiver<Result<Frame>>,
    worker: Option<JoinHandle<()>>,
}

impl Iterator for FrameStream {
    type Item = Result<Frame>;

    fn next(&mut self) -> Option<Self::Item> {
        let item = self.rx.recv().ok();
        if item.is_none() {
            if let Some(worker) = self.worker.take() {
                worker.join().expect("frame reader thread panicked");
            }
        }
        item
    }
}

pub fn read_frames(source: FrameSource) -> Result<FrameStream> {
    let frames = frames_iter(source)?;
    let (tx, rx) = sync_channel(QUEUE_DEPTH);
    let worker = thread::spawn(move || {
        for frame in frames {
            let stop = frame.is_err();
            if tx.send(frame).is_err() || stop {
                break;
            }
        }
    });
    Ok(FrameStream {
        rx,
        worker: Some(worker),
    })
}
