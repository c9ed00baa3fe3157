//! Plain-text formats: two-column tables, run-length encoded flag vectors and
//! path dumps. Floats are written with Rust's shortest round-trip form.

use crate::detector::{FlagKind, FlagParams, IntervalFlags};
use crate::error::{Error, Result};
use crate::path::{PathKind, SamplePath};

/// Parses whitespace- or comma-separated `x y` rows. Blank lines and lines
/// starting with `#` are skipped; so is a non-numeric first row (a header).
pub fn parse_two_columns(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut seen_row = false;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|s| s.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 2 => {
                xs.push(v[0]);
                ys.push(v[1]);
            }
            None if !seen_row => {}
            _ => {
                return Err(Error::Parse(format!(
                    "line {}: expected two numbers, got `{line}`",
                    lineno + 1
                )))
            }
        }
        seen_row = true;
    }
    if xs.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    Ok((xs, ys))
}

pub fn format_two_columns(header: &str, rows: &[(f64, f64)]) -> String {
    let mut out = format!("# {header}\n");
    for (x, y) in rows {
        out.push_str(&format!("{x} {y}\n"));
    }
    out
}

/// `# flags level=M kind=KIND` followed by `bit run` lines. Parameters are
/// not stored.
pub fn flags_to_rle(flags: &IntervalFlags) -> String {
    let mut out = format!("# flags level={} kind={}\n", flags.level(), flags.kind().as_str());
    let mut iter = flags.iter();
    let mut cur = iter.next().unwrap_or(false);
    let mut run = 1usize;
    for bit in iter {
        if bit == cur {
            run += 1;
        } else {
            out.push_str(&format!("{} {run}\n", cur as u8));
            cur = bit;
            run = 1;
        }
    }
    out.push_str(&format!("{} {run}\n", cur as u8));
    out
}

fn header_field<'a>(header: &'a str, key: &str) -> Result<&'a str> {
    header
        .split_whitespace()
        .find_map(|f| f.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| Error::Parse(format!("header lacks `{key}=`")))
}

pub fn flags_from_rle(text: &str) -> Result<IntervalFlags> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .and_then(|h| h.strip_prefix("# flags"))
        .ok_or_else(|| Error::Parse("missing `# flags` header".into()))?;
    let level: u32 = header_field(header, "level")?
        .parse()
        .map_err(|_| Error::Parse("bad level".into()))?;
    if level > 30 {
        return Err(Error::Parse(format!("level {level} too large")));
    }
    let kind = FlagKind::parse(header_field(header, "kind")?)?;
    let mut bits = Vec::with_capacity(1 << level);
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(b), Some(r), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse(format!("bad run `{line}`")));
        };
        let bit = match b {
            "0" => false,
            "1" => true,
            _ => return Err(Error::Parse(format!("bad bit `{b}`"))),
        };
        let run: usize = r.parse().map_err(|_| Error::Parse(format!("bad run length `{r}`")))?;
        if bits.len() + run > 1 << level {
            return Err(Error::Parse("runs exceed 2^level".into()));
        }
        bits.extend(std::iter::repeat_n(bit, run));
    }
    if bits.len() != 1 << level {
        return Err(Error::Parse(format!("runs cover {} of {} intervals", bits.len(), 1usize << level)));
    }
    Ok(IntervalFlags::from_fn(level, kind, FlagParams::default(), |k| bits[k]))
}

fn kind_name(kind: PathKind) -> &'static str {
    match kind {
        PathKind::Bm => "BM",
        PathKind::Fbm => "FBM",
        PathKind::Drifted => "DRIFTED",
    }
}

/// `# path kind=K level=N seed=S` followed by one value per line.
pub fn path_to_text(path: &SamplePath) -> String {
    let mut out = format!(
        "# path kind={} level={} seed={}\n",
        kind_name(path.kind()),
        path.level(),
        path.seed()
    );
    for v in path.values() {
        out.push_str(&format!("{v}\n"));
    }
    out
}

pub fn path_from_text(text: &str) -> Result<SamplePath> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .and_then(|h| h.strip_prefix("# path"))
        .ok_or_else(|| Error::Parse("missing `# path` header".into()))?;
    let kind = match header_field(header, "kind")? {
        "BM" => PathKind::Bm,
        "FBM" => PathKind::Fbm,
        "DRIFTED" => PathKind::Drifted,
        k => return Err(Error::Parse(format!("unknown path kind `{k}`"))),
    };
    let level = header_field(header, "level")?
        .parse()
        .map_err(|_| Error::Parse("bad level".into()))?;
    let seed = header_field(header, "seed")?
        .parse()
        .map_err(|_| Error::Parse("bad seed".into()))?;
    let values = lines
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| l.parse().map_err(|_| Error::Parse(format!("bad value `{l}`"))))
        .collect::<Result<Vec<f64>>>()?;
    SamplePath::from_values(kind, level, values, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_columns_round_trip() {
        let rows = vec![(0.0, 1.5), (0.25, -2e-9), (1.0, 3.0)];
        let (x, y) = parse_two_columns(&format_two_columns("t f", &rows)).unwrap();
        assert_eq!(x, vec![0.0, 0.25, 1.0]);
        assert_eq!(y, vec![1.5, -2e-9, 3.0]);
        assert!(parse_two_columns("t,w\n0.5,1\n").is_ok());
        assert!(parse_two_columns("0.5 1\nabc 2\n").is_err());
        assert!(parse_two_columns("# nothing\n").is_err());
    }

    #[test]
    fn rle_round_trip() {
        let f = IntervalFlags::from_fn(7, FlagKind::ZeroNear, FlagParams::default(), |k| k % 5 < 2 || k > 100);
        let text = flags_to_rle(&f);
        assert!(text.starts_with("# flags level=7 kind=ZERO_NEAR\n1 2\n0 3\n"));
        let g = flags_from_rle(&text).unwrap();
        assert_eq!(g.iter().collect::<Vec<_>>(), f.iter().collect::<Vec<_>>());
        assert!(flags_from_rle("# flags level=2 kind=FAST_L\n1 3\n").is_err());
    }

    #[test]
    fn path_round_trip() {
        let p = crate::path::sample_bm(5, 4).unwrap();
        let q = path_from_text(&path_to_text(&p)).unwrap();
        assert_eq!(p.values(), q.values());
        assert_eq!(q.seed(), 5);
    }
}
