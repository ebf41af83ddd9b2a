//! ASCII PLY subset: one `element vertex N` with float/double properties
//! x, y, z. Other elements and properties are parsed past and dropped;
//! `property list` data consumes one line per item like any other element.

use super::{CloudError, Point3};

struct Element {
    count: usize,
    is_vertex: bool,
    /// Property index of x, y, z (vertex element only).
    xyz_props: [usize; 3],
    prop_count: usize,
}

pub fn parse(text: &str) -> Result<Vec<Point3>, CloudError> {
    let mut lines = text.lines().enumerate();

    let (_, magic) = lines
        .next()
        .ok_or_else(|| CloudError::parse(1, "empty file"))?;
    if magic.trim() != "ply" {
        return Err(CloudError::parse(1, "missing ply magic"));
    }

    let mut elements: Vec<Element> = Vec::new();
    let mut saw_format = false;
    let mut header_done = false;

    for (idx, raw) in lines.by_ref() {
        let line = raw.trim();
        let lineno = idx + 1;
        if line.is_empty() || line.starts_with("comment") {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next().unwrap_or("") {
            "format" => {
                let rest: Vec<&str> = tokens.collect();
                if rest != ["ascii", "1.0"] {
                    return Err(CloudError::parse(lineno, "only format ascii 1.0 is supported"));
                }
                saw_format = true;
            }
            "element" => {
                let name = tokens
                    .next()
                    .ok_or_else(|| CloudError::parse(lineno, "element needs a name"))?;
                let count: usize = tokens
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| CloudError::parse(lineno, "bad element count"))?;
                elements.push(Element {
                    count,
                    is_vertex: name == "vertex",
                    xyz_props: [usize::MAX; 3],
                    prop_count: 0,
                });
            }
            "property" => {
                let elem = elements
                    .last_mut()
                    .ok_or_else(|| CloudError::parse(lineno, "property before element"))?;
                let ty = tokens
                    .next()
                    .ok_or_else(|| CloudError::parse(lineno, "property needs a type"))?;
                // A list property still occupies one slot; its per-line
                // payload length varies so records are length-checked only
                // for the vertex element.
                let name = if ty == "list" {
                    tokens.nth(2).unwrap_or("")
                } else {
                    tokens.next().unwrap_or("")
                };
                if elem.is_vertex {
                    let slot = match name {
                        "x" => Some(0),
                        "y" => Some(1),
                        "z" => Some(2),
                        _ => None,
                    };
                    if let Some(slot) = slot {
                        if !matches!(ty, "float" | "double" | "float32" | "float64") {
                            return Err(CloudError::parse(
                                lineno,
                                format!("vertex {name} must be float, got {ty}"),
                            ));
                        }
                        elem.xyz_props[slot] = elem.prop_count;
                    }
                }
                elem.prop_count += 1;
            }
            "end_header" => {
                header_done = true;
                break;
            }
            other => return Err(CloudError::parse(lineno, format!("unknown header line {other}"))),
        }
    }

    if !header_done {
        return Err(CloudError::parse(0, "truncated PLY header"));
    }
    if !saw_format {
        return Err(CloudError::parse(0, "missing format line"));
    }
    let vertex = elements.iter().find(|e| e.is_vertex);
    let vertex = vertex.ok_or_else(|| CloudError::parse(0, "no vertex element"))?;
    if vertex.xyz_props.contains(&usize::MAX) {
        return Err(CloudError::parse(0, "vertex element lacks x y z properties"));
    }

    let mut points = Vec::with_capacity(vertex.count);
    let mut data_lines = lines.filter(|(_, l)| !l.trim().is_empty());

    for elem in &elements {
        for _ in 0..elem.count {
            let (idx, raw) = data_lines.next().ok_or_else(|| {
                CloudError::parse(0, format!("file ends before all {} rows", elem.count))
            })?;
            if !elem.is_vertex {
                continue;
            }
            let lineno = idx + 1;
            let cols: Vec<&str> = raw.split_whitespace().collect();
            if cols.len() != elem.prop_count {
                return Err(CloudError::parse(
                    lineno,
                    format!("expected {} properties, found {}", elem.prop_count, cols.len()),
                ));
            }
            let mut coords = [0.0_f64; 3];
            for (k, &prop) in elem.xyz_props.iter().enumerate() {
                coords[k] = cols[prop].parse().map_err(|_| {
                    CloudError::parse(lineno, format!("bad number {:?}", cols[prop]))
                })?;
            }
            let p = Point3::new(coords[0], coords[1], coords[2]);
            if !p.is_finite() {
                return Err(CloudError::parse(lineno, "non-finite coordinate"));
            }
            points.push(p);
        }
    }

    if let Some((idx, _)) = data_lines.next() {
        return Err(CloudError::parse(idx + 1, "trailing data after declared elements"));
    }
    Ok(points)
}

pub fn render(points: &[Point3]) -> String {
    let mut out = String::with_capacity(128 + 48 * points.len());
    out.push_str("ply\n");
    out.push_str("format ascii 1.0\n");
    out.push_str(&format!("element vertex {}\n", points.len()));
    out.push_str("property double x\n");
    out.push_str("property double y\n");
    out.push_str("property double z\n");
    out.push_str("end_header\n");
    for p in points {
        out.push_str(&format!("{} {} {}\n", p.x, p.y, p.z));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_vertex() {
        let text = "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nproperty float z\nend_header\n0.5 0 0.25\n";
        assert_eq!(parse(text).unwrap(), vec![Point3::new(0.5, 0.0, 0.25)]);
    }

    #[test]
    fn skips_other_elements_and_properties() {
        let text = "ply\nformat ascii 1.0\ncomment made by hand\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\nproperty uchar red\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0 255\n1 1 1 0\n3 0 1 0\n";
        assert_eq!(
            parse(text).unwrap(),
            vec![Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 1.0, 1.0)]
        );
    }

    #[test]
    fn missing_rows_rejected() {
        let text = "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\nend_header\n0 0 0\n";
        assert!(matches!(parse(text), Err(CloudError::Parse { .. })));
    }

    #[test]
    fn empty_cloud_round_trips() {
        let rendered = render(&[]);
        assert_eq!(parse(&rendered).unwrap(), vec![]);
    }

    #[test]
    fn render_parses_back_exactly() {
        let pts = vec![Point3::new(1.0 / 3.0, -2.0 / 7.0, 5e-9)];
        assert_eq!(parse(&render(&pts)).unwrap(), pts);
    }
}
