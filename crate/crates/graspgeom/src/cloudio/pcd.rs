//! ASCII PCD subset: header keys VERSION, FIELDS (must contain x y z),
//! SIZE, TYPE, COUNT, WIDTH, HEIGHT, VIEWPOINT, POINTS, DATA ascii.
//! One whitespace-separated record per line; extra fields are skipped.

use super::{CloudError, Point3};

struct Header {
    /// Column offset of x, y, z within a record.
    xyz_cols: [usize; 3],
    /// Total scalar columns per record.
    record_width: usize,
    points: usize,
}

fn parse_header(lines: &mut std::iter::Enumerate<std::str::Lines>) -> Result<Header, CloudError> {
    let mut fields: Option<Vec<String>> = None;
    let mut counts: Option<Vec<usize>> = None;
    let mut points: Option<usize> = None;
    let mut width: Option<usize> = None;
    let mut height: Option<usize> = None;

    for (idx, raw) in lines.by_ref() {
        let line = raw.trim();
        let lineno = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let key = tokens.next().unwrap_or("");
        let rest: Vec<&str> = tokens.collect();
        match key {
            "VERSION" | "SIZE" | "TYPE" | "VIEWPOINT" => {}
            "FIELDS" => fields = Some(rest.iter().map(|s| s.to_string()).collect()),
            "COUNT" => {
                let parsed: Result<Vec<usize>, _> = rest.iter().map(|s| s.parse()).collect();
                counts = Some(parsed.map_err(|_| CloudError::parse(lineno, "bad COUNT"))?);
            }
            "WIDTH" => {
                width = Some(
                    rest.first()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| CloudError::parse(lineno, "bad WIDTH"))?,
                )
            }
            "HEIGHT" => {
                height = Some(
                    rest.first()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| CloudError::parse(lineno, "bad HEIGHT"))?,
                )
            }
            "POINTS" => {
                points = Some(
                    rest.first()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| CloudError::parse(lineno, "bad POINTS"))?,
                )
            }
            "DATA" => {
                if rest.first().copied() != Some("ascii") {
                    return Err(CloudError::parse(lineno, "only DATA ascii is supported"));
                }
                let fields =
                    fields.ok_or_else(|| CloudError::parse(lineno, "missing FIELDS line"))?;
                let counts = counts.unwrap_or_else(|| vec![1; fields.len()]);
                if counts.len() != fields.len() {
                    return Err(CloudError::parse(lineno, "COUNT/FIELDS length mismatch"));
                }
                let points = points
                    .or_else(|| Some(width? * height?))
                    .ok_or_else(|| CloudError::parse(lineno, "missing POINTS line"))?;

                let mut xyz_cols = [usize::MAX; 3];
                let mut col = 0;
                for (f, c) in fields.iter().zip(&counts) {
                    match f.as_str() {
                        "x" => xyz_cols[0] = col,
                        "y" => xyz_cols[1] = col,
                        "z" => xyz_cols[2] = col,
                        _ => {}
                    }
                    col += c;
                }
                if xyz_cols.contains(&usize::MAX) {
                    return Err(CloudError::parse(lineno, "FIELDS must include x y z"));
                }
                return Ok(Header {
                    xyz_cols,
                    record_width: col,
                    points,
                });
            }
            other => {
                return Err(CloudError::parse(lineno, format!("unknown header key {other}")))
            }
        }
    }
    Err(CloudError::parse(0, "truncated PCD header (no DATA line)"))
}

pub fn parse(text: &str) -> Result<Vec<Point3>, CloudError> {
    let mut lines = text.lines().enumerate();
    let header = parse_header(&mut lines)?;
    let mut points = Vec::with_capacity(header.points);

    for (idx, raw) in lines {
        let line = raw.trim();
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        if points.len() == header.points {
            return Err(CloudError::parse(
                lineno,
                format!("more records than the declared {} points", header.points),
            ));
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != header.record_width {
            return Err(CloudError::parse(
                lineno,
                format!("expected {} columns, found {}", header.record_width, cols.len()),
            ));
        }
        let mut coords = [0.0_f64; 3];
        for (k, &col) in header.xyz_cols.iter().enumerate() {
            coords[k] = cols[col]
                .parse()
                .map_err(|_| CloudError::parse(lineno, format!("bad number {:?}", cols[col])))?;
        }
        let p = Point3::new(coords[0], coords[1], coords[2]);
        if !p.is_finite() {
            return Err(CloudError::parse(lineno, "non-finite coordinate"));
        }
        points.push(p);
    }

    if points.len() != header.points {
        return Err(CloudError::parse(
            0,
            format!("declared {} points, found {}", header.points, points.len()),
        ));
    }
    Ok(points)
}

pub fn render(points: &[Point3]) -> String {
    let n = points.len();
    let mut out = String::with_capacity(128 + 48 * n);
    out.push_str("# .PCD v0.7 - Point Cloud Data file format\n");
    out.push_str("VERSION 0.7\n");
    out.push_str("FIELDS x y z\n");
    out.push_str("SIZE 8 8 8\n");
    out.push_str("TYPE F F F\n");
    out.push_str("COUNT 1 1 1\n");
    out.push_str(&format!("WIDTH {n}\n"));
    out.push_str("HEIGHT 1\n");
    out.push_str("VIEWPOINT 0 0 0 1 0 0 0\n");
    out.push_str(&format!("POINTS {n}\n"));
    out.push_str("DATA ascii\n");
    for p in points {
        out.push_str(&format!("{} {} {}\n", p.x, p.y, p.z));
    }
    out
}
