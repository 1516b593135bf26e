//! Flag parsing helpers, atomic file writes, and table styling.

use std::io::Write as _;
use std::path::Path;

use whorl_core::{Point, Rect, SeedStrategy};

use crate::CliError;

/// Parses `x0,x1,y0,y1` into a nonempty window.
pub fn parse_window(text: &str) -> Result<Rect, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(CliError::Usage(format!(
            "--window expects x0,x1,y0,y1 (got `{text}`)"
        )));
    }
    let mut vals = [0.0; 4];
    for (slot, part) in vals.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("bad window coordinate `{part}`")))?;
    }
    let window = Rect::new(vals[0], vals[1], vals[2], vals[3]);
    if window.is_empty() || !vals.iter().all(|v| v.is_finite()) {
        return Err(CliError::Usage(format!("window `{text}` is empty")));
    }
    Ok(window)
}

/// Parses `WxH` grid dimensions.
pub fn parse_grid(text: &str) -> Result<(usize, usize), CliError> {
    let err = || CliError::Usage(format!("--grid expects WxH, e.g. 64x48 (got `{text}`)"));
    let (w, h) = text.split_once(['x', 'X']).ok_or_else(err)?;
    let w: usize = w.trim().parse().map_err(|_| err())?;
    let h: usize = h.trim().parse().map_err(|_| err())?;
    if w < 2 || h < 2 {
        return Err(CliError::Usage(
            "orientation grids need at least 2 cells per side".to_string(),
        ));
    }
    Ok((w, h))
}

/// Parses one seed-strategy flag:
/// `grid:NXxNY`, `ring:CX,CY:R1;R2;..:COUNT`, or `explicit:X,Y;X,Y;..`.
pub fn parse_seed_strategy(text: &str) -> Result<SeedStrategy, CliError> {
    let usage = || {
        CliError::Usage(format!(
            "bad --seeds value `{text}`; expected grid:NXxNY, \
             ring:CX,CY:R1;R2:COUNT, or explicit:X,Y;X,Y"
        ))
    };
    let (kind, rest) = text.split_once(':').ok_or_else(usage)?;
    match kind {
        "grid" => {
            let (nx, ny) = parse_grid(rest).map_err(|_| usage())?;
            Ok(SeedStrategy::Grid { nx, ny })
        }
        "ring" => {
            let mut sections = rest.split(':');
            let center = sections.next().ok_or_else(usage)?;
            let radii = sections.next().ok_or_else(usage)?;
            let count = sections.next().ok_or_else(usage)?;
            if sections.next().is_some() {
                return Err(usage());
            }
            let center = parse_point(center).ok_or_else(usage)?;
            let radii: Option<Vec<f64>> = radii
                .split(';')
                .map(|r| r.trim().parse::<f64>().ok().filter(|v| *v > 0.0))
                .collect();
            let count: usize = count.trim().parse().map_err(|_| usage())?;
            match (radii, count) {
                (Some(radii), c) if c > 0 && !radii.is_empty() => Ok(SeedStrategy::Ring {
                    center,
                    radii,
                    count,
                }),
                _ => Err(usage()),
            }
        }
        "explicit" => {
            let points: Option<Vec<Point>> = rest.split(';').map(parse_point).collect();
            match points {
                Some(points) if !points.is_empty() => Ok(SeedStrategy::Explicit(points)),
                _ => Err(usage()),
            }
        }
        _ => Err(usage()),
    }
}

fn parse_point(text: &str) -> Option<Point> {
    let (x, y) = text.split_once(',')?;
    let x = x.trim().parse::<f64>().ok()?;
    let y = y.trim().parse::<f64>().ok()?;
    (x.is_finite() && y.is_finite()).then_some([x, y])
}

/// Writes a file atomically: the content lands in a temporary file in
/// the destination directory and is renamed into place, so a failing
/// run never leaves a partial or clobbered output behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io_err = |e: std::io::Error| CliError::Usage(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

/// ANSI bold unless NO_COLOR is set (non-empty) or stdout is not a tty.
pub fn bold(text: &str) -> String {
    let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
    let tty = std::io::IsTerminal::is_terminal(&std::io::stdout());
    if no_color || !tty {
        text.to_string()
    } else {
        format!("\x1b[1m{text}\x1b[0m")
    }
}

pub fn format_complex(re: f64, im: f64) -> String {
    format!("{re:.6}{im:+.6}i")
}
