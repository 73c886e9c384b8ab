//! OFF / Wavefront OBJ triangle-surface ingestion.

use std::collections::{HashMap, VecDeque};
use std::fs;
use std::path::Path;

use super::{SurfaceKind, SurfaceMesh, Triangulation, Vec3};
use crate::error::{Error, Result};

/// Loads a closed, orientable triangle surface. Each face becomes one
/// quadrature node at its centroid weighted by its area; normals are
/// reoriented so they point into the body whatever the input winding.
pub fn load_triangle_mesh(path: impl AsRef<Path>) -> Result<SurfaceMesh> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let is_off = path.extension().map(|e| e.eq_ignore_ascii_case("off")).unwrap_or(false)
        || text.trim_start().starts_with("OFF");
    let (vertices, faces) =
        if is_off { parse_off(&text) } else { parse_obj(&text) }.map_err(|message| Error::Format {
            path: path.to_path_buf(),
            message,
        })?;
    mesh_from_triangles(vertices, faces)
}

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
}

fn parse_f64(tok: Option<&str>, what: &str) -> Result<f64, String> {
    tok.ok_or_else(|| format!("missing {what}"))?
        .parse()
        .map_err(|e| format!("bad {what}: {e}"))
}

fn parse_off(text: &str) -> Result<(Vec<Vec3>, Vec<[usize; 3]>), String> {
    let mut lines = data_lines(text);
    let header = lines.next().ok_or("empty OFF file")?;
    let mut rest_of_header = header
        .strip_prefix("OFF")
        .ok_or("missing OFF header")?
        .split_whitespace()
        .peekable();
    let counts_line;
    let mut counts = if rest_of_header.peek().is_some() {
        rest_of_header
    } else {
        counts_line = lines.next().ok_or("missing OFF counts")?;
        counts_line.split_whitespace().peekable()
    };
    let nv: usize = counts
        .next()
        .ok_or("missing vertex count")?
        .parse()
        .map_err(|e| format!("bad vertex count: {e}"))?;
    let nf: usize = counts
        .next()
        .ok_or("missing face count")?
        .parse()
        .map_err(|e| format!("bad face count: {e}"))?;

    let mut vertices = Vec::with_capacity(nv);
    for i in 0..nv {
        let line = lines.next().ok_or_else(|| format!("missing vertex {i}"))?;
        let mut t = line.split_whitespace();
        let x = parse_f64(t.next(), "x")?;
        let y = parse_f64(t.next(), "y")?;
        let z = parse_f64(t.next(), "z")?;
        vertices.push(Vec3::new(x, y, z));
    }
    let mut faces = Vec::with_capacity(nf);
    for i in 0..nf {
        let line = lines.next().ok_or_else(|| format!("missing face {i}"))?;
        let idx: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| format!("face {i}: {e}")))
            .collect::<Result<_, _>>()?;
        match idx.as_slice() {
            [3, a, b, c, ..] => faces.push([*a, *b, *c]),
            [k, ..] => return Err(format!("face {i} has {k} vertices; only triangles are supported")),
            [] => return Err(format!("face {i} is empty")),
        }
    }
    check_indices(&faces, vertices.len())?;
    Ok((vertices, faces))
}

fn parse_obj(text: &str) -> Result<(Vec<Vec3>, Vec<[usize; 3]>), String> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (lineno, line) in data_lines(text).enumerate() {
        let mut t = line.split_whitespace();
        match t.next() {
            Some("v") => {
                let x = parse_f64(t.next(), "x")?;
                let y = parse_f64(t.next(), "y")?;
                let z = parse_f64(t.next(), "z")?;
                vertices.push(Vec3::new(x, y, z));
            }
            Some("f") => {
                let idx: Vec<usize> = t
                    .map(|tok| {
                        let head = tok.split('/').next().unwrap_or("");
                        let i: i64 = head
                            .parse()
                            .map_err(|e| format!("line {}: bad face index {tok}: {e}", lineno + 1))?;
                        let resolved = if i < 0 { vertices.len() as i64 + i } else { i - 1 };
                        usize::try_from(resolved)
                            .map_err(|_| format!("line {}: face index {tok} out of range", lineno + 1))
                    })
                    .collect::<Result<_, _>>()?;
                if idx.len() != 3 {
                    return Err(format!(
                        "line {}: face has {} vertices; only triangles are supported",
                        lineno + 1,
                        idx.len()
                    ));
                }
                faces.push([idx[0], idx[1], idx[2]]);
            }
            _ => {}
        }
    }
    check_indices(&faces, vertices.len())?;
    Ok((vertices, faces))
}

fn check_indices(faces: &[[usize; 3]], nv: usize) -> Result<(), String> {
    if faces.is_empty() {
        return Err("no faces".into());
    }
    for (i, f) in faces.iter().enumerate() {
        if f.iter().any(|&v| v >= nv) {
            return Err(format!("face {i} references a missing vertex"));
        }
    }
    Ok(())
}

/// Orients faces consistently (BFS across shared edges) and then outward by
/// the signed-volume test, component by component.
fn orient(vertices: &[Vec3], faces: &mut [[usize; 3]]) -> Result<()> {
    let mut edge_faces: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
            return Err(Error::Topology(format!("face {fi} repeats a vertex")));
        }
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            edge_faces.entry((a.min(b), a.max(b))).or_default().push(fi);
        }
    }
    for (edge, fs) in &edge_faces {
        match fs.len() {
            2 => {}
            1 => return Err(Error::Topology(format!("open surface: boundary edge {edge:?}"))),
            k => {
                return Err(Error::Topology(format!(
                    "non-manifold edge {edge:?} shared by {k} faces"
                )))
            }
        }
    }

    let has_directed = |f: &[usize; 3], a: usize, b: usize| (0..3).any(|k| f[k] == a && f[(k + 1) % 3] == b);

    let mut visited = vec![false; faces.len()];
    for seed in 0..faces.len() {
        if visited[seed] {
            continue;
        }
        let mut component = vec![seed];
        visited[seed] = true;
        let mut queue = VecDeque::from([seed]);
        while let Some(fi) = queue.pop_front() {
            let f = faces[fi];
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                for &gi in &edge_faces[&(a.min(b), a.max(b))] {
                    if gi == fi {
                        continue;
                    }
                    // A consistent neighbour traverses the shared edge as b → a.
                    let same_direction = has_directed(&faces[gi], a, b);
                    if visited[gi] {
                        if same_direction {
                            return Err(Error::Topology("surface is not orientable".into()));
                        }
                        continue;
                    }
                    if same_direction {
                        faces[gi].swap(1, 2);
                    }
                    visited[gi] = true;
                    component.push(gi);
                    queue.push_back(gi);
                }
            }
        }
        let signed: f64 = component
            .iter()
            .map(|&fi| {
                let [a, b, c] = faces[fi];
                vertices[a].dot(&vertices[b].cross(&vertices[c]))
            })
            .sum();
        if signed < 0.0 {
            for &fi in &component {
                faces[fi].swap(1, 2);
            }
        }
    }
    Ok(())
}

pub(crate) fn mesh_from_triangles(vertices: Vec<Vec3>, mut faces: Vec<[usize; 3]>) -> Result<SurfaceMesh> {
    orient(&vertices, &mut faces)?;
    let mut nodes = Vec::with_capacity(faces.len());
    let mut normals = Vec::with_capacity(faces.len());
    let mut weights = Vec::with_capacity(faces.len());
    let mut volume = 0.0;
    let mut moment = Vec3::zeros();
    for (fi, &[a, b, c]) in faces.iter().enumerate() {
        let (p, q, r) = (vertices[a], vertices[b], vertices[c]);
        let cross = (q - p).cross(&(r - p));
        let area = 0.5 * cross.norm();
        if !(area > 0.0) {
            return Err(Error::Topology(format!("face {fi} has zero area")));
        }
        let tet = p.dot(&q.cross(&r)) / 6.0;
        volume += tet;
        moment += (p + q + r) * (tet / 4.0);
        nodes.push((p + q + r) / 3.0);
        normals.push(-cross / (2.0 * area));
        weights.push(area);
    }
    if !(volume > 0.0) {
        return Err(Error::Topology("surface encloses no volume".into()));
    }
    let centroid = moment / volume;
    SurfaceMesh::from_parts(
        nodes,
        normals,
        weights,
        SurfaceKind::Triangulated(Triangulation { vertices, faces }),
        volume,
        centroid,
    )
}
