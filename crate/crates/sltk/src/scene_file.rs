//! Plain-text scene scripts: `key = value` lines, then a `path:` table of
//! keyframes (`frame x y size`), linearly interpolated.
//!
//! ```text
//! frames = 120
//! shape = disk
//! background = checker 20 200 200 200 60 60 60
//! path:
//! 0   40 60 25
//! 119 120 60 25
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sltk_core::scene::{Background, BrightnessJump, Keyframe, Occlusion, SceneScript, Shape};
use sltk_core::Rgb;

use crate::error::{Error, IoContext, Result};

fn numbers<T: std::str::FromStr>(value: &str, count: usize) -> std::result::Result<Vec<T>, String> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    if parts.len() != count {
        return Err(format!("expected {count} numbers, got `{value}`"));
    }
    parts
        .iter()
        .map(|p| p.parse().map_err(|_| format!("invalid number `{p}`")))
        .collect()
}

fn rgb(v: &[u8]) -> Rgb {
    [v[0], v[1], v[2]]
}

fn parse_shape(value: &str) -> std::result::Result<Shape, String> {
    let mut parts = value.split_whitespace();
    let shape = match parts.next() {
        Some("disk") => Shape::Disk,
        Some("square") => Shape::Square,
        Some("hand") => Shape::Hand,
        Some("rect") => {
            let aspect = parts
                .next()
                .and_then(|a| a.parse().ok())
                .ok_or("rect needs an aspect ratio")?;
            Shape::Rect { aspect }
        }
        _ => return Err(format!("unknown shape `{value}`")),
    };
    match parts.next() {
        Some(extra) => Err(format!("unexpected `{extra}` after shape")),
        None => Ok(shape),
    }
}

fn parse_background(value: &str) -> std::result::Result<Background, String> {
    match value.split_once(char::is_whitespace) {
        Some(("uniform", rest)) => Ok(Background::Uniform(rgb(&numbers(rest, 3)?))),
        Some(("checker", rest)) => {
            let v: Vec<usize> = numbers(rest, 7)?;
            if v[1..].iter().any(|&c| c > 255) {
                return Err("color channel above 255".into());
            }
            let c = |i: usize| [v[i] as u8, v[i + 1] as u8, v[i + 2] as u8];
            Ok(Background::Checker {
                cell: v[0],
                a: c(1),
                b: c(4),
            })
        }
        _ => Err(format!("unknown background `{value}`")),
    }
}

pub fn parse_scene(text: &str, origin: &str) -> Result<SceneScript> {
    let mut script = SceneScript::new(1, Shape::Disk, 10.0);
    let mut keys = Vec::new();
    let mut in_path = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            origin: origin.to_owned(),
            line: i + 1,
            message,
        };
        if in_path {
            let v: Vec<f64> = numbers(line, 4).map_err(err)?;
            if v[0] < 0.0 || v[0].fract() != 0.0 {
                return Err(err(format!("invalid frame index `{}`", v[0])));
            }
            keys.push(Keyframe {
                frame: v[0] as usize,
                x: v[1],
                y: v[2],
                size: v[3],
            });
            continue;
        }
        if line == "path:" {
            in_path = true;
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err("expected `key = value` or `path:`".into()))?;
        let value = value.trim();
        let one = |value: &str| -> std::result::Result<u64, String> {
            value
                .parse()
                .map_err(|_| format!("invalid number `{value}`"))
        };
        let result: std::result::Result<(), String> = (|| {
            match key.trim() {
                "frames" => script.frames = one(value)? as usize,
                "fps" => script.fps = one(value)? as u32,
                "width" => script.width = one(value)? as usize,
                "height" => script.height = one(value)? as usize,
                "capture_scale" => script.capture_scale = one(value)? as usize,
                "background" => script.background = parse_background(value)?,
                "shape" => script.shape = parse_shape(value)?,
                "color" => script.color = rgb(&numbers(value, 3)?),
                "noise" => script.noise = numbers::<u8>(value, 1)?[0],
                "brightness_jump" => {
                    let v: Vec<i64> = numbers(value, 2)?;
                    script.brightness_jump = Some(BrightnessJump {
                        frame: usize::try_from(v[0]).map_err(|_| "negative frame")?,
                        offset: i16::try_from(v[1]).map_err(|_| "offset out of range")?,
                    });
                }
                "motion_blur" => script.motion_blur = one(value)? as usize,
                "occlusion" => {
                    let v: Vec<f64> = numbers(value, 7)?;
                    if v[4..]
                        .iter()
                        .any(|&c| !(0.0..=255.0).contains(&c) || c.fract() != 0.0)
                    {
                        return Err("occlusion color must be three integers 0..255".into());
                    }
                    script.occlusions.push(Occlusion {
                        x0: v[0],
                        y0: v[1],
                        x1: v[2],
                        y1: v[3],
                        color: [v[4] as u8, v[5] as u8, v[6] as u8],
                    });
                }
                "seed" => script.seed = one(value)?,
                other => return Err(format!("unknown scene key `{other}`")),
            }
            Ok(())
        })();
        result.map_err(err)?;
    }
    if keys.is_empty() {
        return Err(Error::Parse {
            origin: origin.to_owned(),
            line: text.lines().count(),
            message: "missing `path:` table".into(),
        });
    }
    let frames = script.frames;
    let script = script.with_keyframes(&keys)?;
    debug_assert_eq!(script.centers.len(), frames);
    script.validate()?;
    Ok(script)
}

pub fn load_scene(path: &Path) -> Result<SceneScript> {
    parse_scene(
        &fs::read_to_string(path).at(path)?,
        &path.display().to_string(),
    )
}

/// Writes a script with one path row per frame, so any script round-trips.
pub fn format_scene(script: &SceneScript) -> String {
    let mut out = String::new();
    let c = |c: Rgb| format!("{} {} {}", c[0], c[1], c[2]);
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("frames = {}", script.frames));
    line(format!("fps = {}", script.fps));
    line(format!("width = {}", script.width));
    line(format!("height = {}", script.height));
    line(format!("capture_scale = {}", script.capture_scale));
    line(match script.background {
        Background::Uniform(a) => format!("background = uniform {}", c(a)),
        Background::Checker { cell, a, b } => {
            format!("background = checker {cell} {} {}", c(a), c(b))
        }
    });
    line(match script.shape {
        Shape::Disk => "shape = disk".into(),
        Shape::Square => "shape = square".into(),
        Shape::Hand => "shape = hand".into(),
        Shape::Rect { aspect } => format!("shape = rect {aspect}"),
    });
    line(format!("color = {}", c(script.color)));
    line(format!("noise = {}", script.noise));
    if let Some(j) = script.brightness_jump {
        line(format!("brightness_jump = {} {}", j.frame, j.offset));
    }
    line(format!("motion_blur = {}", script.motion_blur));
    for o in &script.occlusions {
        line(format!(
            "occlusion = {} {} {} {} {}",
            o.x0,
            o.y0,
            o.x1,
            o.y1,
            c(o.color)
        ));
    }
    line(format!("seed = {}", script.seed));
    out.push_str("path:\n");
    for (i, ((x, y), s)) in script.centers.iter().zip(&script.sizes).enumerate() {
        writeln!(out, "{i} {x} {y} {s}").expect("writing to a string");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_script() {
        let text = "\
frames = 5
fps = 25
shape = rect 2.5
color = 10 20 30
background = checker 16 200 200 200 40 40 40
noise = 3
brightness_jump = 3 -20
motion_blur = 2
occlusion = 0 0 10 10 1 2 3
seed = 77
path:
0 40 60 10   # start
4 80 60 20
";
        let s = parse_scene(text, "t").unwrap();
        assert_eq!(s.frames, 5);
        assert_eq!(s.fps, 25);
        assert_eq!(s.shape, Shape::Rect { aspect: 2.5 });
        assert_eq!(s.centers[2], (60.0, 60.0));
        assert_eq!(s.sizes[2], 15.0);
        assert_eq!(
            s.brightness_jump,
            Some(BrightnessJump {
                frame: 3,
                offset: -20
            })
        );
        assert_eq!(s.occlusions.len(), 1);
        assert_eq!(parse_scene(&format_scene(&s), "again").unwrap(), s);
    }

    #[test]
    fn reports_bad_lines() {
        let err = parse_scene("frames = 3\nshape = blob\npath:\n0 1 1 1\n", "x.scene").unwrap_err();
        assert_eq!(err.to_string(), "x.scene:2: unknown shape `blob`");
        let err = parse_scene("frames = 3\n", "x.scene").unwrap_err();
        assert!(err.to_string().contains("missing `path:`"));
        let err = parse_scene("frames = 3\npath:\n0 1 1\n", "x.scene").unwrap_err();
        assert!(err.to_string().starts_with("x.scene:3:"));
        assert!(parse_scene("frames = 2\npath:\n0 500 1 1\n", "x").is_err());
    }
}
