//! Text and JSON views of finite patterns.

use monotile_core::{Element, Error, Pattern};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

fn coords(g: &Element) -> Option<Vec<i64>> {
    match g {
        Element::Ints(v) => v.iter().map(|x| i64::try_from(x).ok()).collect(),
        _ => None,
    }
}

/// One line for a 1-D interval, one line per first coordinate for a 2-D box.
pub fn render_pattern(p: &Pattern, format: Format) -> Result<String, Error> {
    if format == Format::Json {
        return Ok(serde_json::to_string_pretty(&p.to_file())?);
    }
    let pts: Vec<Vec<i64>> = p
        .support()
        .iter()
        .map(|g| coords(g).ok_or_else(|| Error::Render(format!("cannot draw element {g}"))))
        .collect::<Result<_, _>>()?;
    let dim = pts.first().map(Vec::len).unwrap_or(1);
    if pts.iter().any(|v| v.len() != dim) || !(1..=2).contains(&dim) {
        return Err(Error::Render("support is not in Z or Z^2".into()));
    }
    let lo: Vec<i64> = (0..dim).map(|i| pts.iter().map(|v| v[i]).min().unwrap_or(0)).collect();
    let hi: Vec<i64> = (0..dim).map(|i| pts.iter().map(|v| v[i]).max().unwrap_or(0)).collect();
    let volume: i64 = (0..dim).map(|i| hi[i] - lo[i] + 1).product();
    if pts.is_empty() || volume != pts.len() as i64 {
        return Err(Error::Render("support is not a box".into()));
    }
    // the support is sorted lexicographically, so it is already in row order
    let syms: Vec<String> = p.symbols().iter().map(u32::to_string).collect();
    let out = if dim == 1 {
        syms.join(" ")
    } else {
        let w = (hi[1] - lo[1] + 1) as usize;
        syms.chunks(w).map(|r| r.join(" ")).collect::<Vec<_>>().join("\n")
    };
    Ok(out)
}
