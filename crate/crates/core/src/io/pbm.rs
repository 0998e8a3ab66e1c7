//! Portable bitmap output. Alive cells are black (1).

use std::path::Path;

use super::frame::pack_msb;
use super::{read_file, write_atomic, FormatError};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PbmMode {
    /// P4, rows packed MSB-first and padded to whole bytes.
    #[default]
    Binary,
    /// P1, one `0`/`1` digit per pixel.
    Ascii,
}

pub fn encode_pbm(grid: &Grid, mode: PbmMode) -> Vec<u8> {
    let (h, w) = grid.dims();
    match mode {
        PbmMode::Binary => {
            let mut out = format!("P4\n{w} {h}\n").into_bytes();
            for row in grid.cells().chunks(w) {
                pack_msb(row.iter().map(|&c| c != 0), &mut out);
            }
            out
        }
        PbmMode::Ascii => {
            let mut out = format!("P1\n{w} {h}\n");
            for row in grid.cells().chunks(w) {
                let line: Vec<&str> = row.iter().map(|&c| if c != 0 { "1" } else { "0" }).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
            out.into_bytes()
        }
    }
}

pub fn render_pbm(grid: &Grid, path: &Path, mode: PbmMode) -> Result<(), FormatError> {
    write_atomic(path, &encode_pbm(grid, mode))
}

/// Reads P1 or P4 data, including `#` comments in the header.
pub fn decode_pbm(bytes: &[u8]) -> Result<Grid, FormatError> {
    let bad = |offset: usize, reason: &str| FormatError::Format {
        offset: offset as u64,
        reason: reason.to_string(),
    };
    let mut pos = 0;
    let token = |pos: &mut usize| -> Result<String, FormatError> {
        loop {
            match bytes.get(*pos) {
                Some(b'#') => {
                    while bytes.get(*pos).is_some_and(|&b| b != b'\n') {
                        *pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => *pos += 1,
                Some(_) => break,
                None => {
                    return Err(FormatError::Length {
                        offset: *pos as u64,
                        needed: 1,
                    })
                }
            }
        }
        let start = *pos;
        while bytes.get(*pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            *pos += 1;
        }
        Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };
    let magic = token(&mut pos)?;
    let width: usize = token(&mut pos)?.parse().map_err(|_| bad(pos, "bad width"))?;
    let height: usize = token(&mut pos)?.parse().map_err(|_| bad(pos, "bad height"))?;
    if width == 0 || height == 0 {
        return Err(bad(pos, "empty image"));
    }
    let mut grid = Grid::new(height, width);
    match magic.as_str() {
        "P4" => {
            pos += 1; // single whitespace byte before raster
            let row_len = width.div_ceil(8);
            let need = row_len * height;
            if bytes.len() < pos + need {
                return Err(FormatError::Length {
                    offset: bytes.len() as u64,
                    needed: (pos + need - bytes.len()) as u64,
                });
            }
            for r in 0..height {
                let row = &bytes[pos + r * row_len..pos + (r + 1) * row_len];
                for c in 0..width {
                    grid.set(r, c, (row[c / 8] >> (7 - c % 8)) & 1 == 1);
                }
            }
        }
        "P1" => {
            let mut i = 0;
            while i < width * height {
                match bytes.get(pos) {
                    Some(b'0') | Some(b'1') => {
                        grid.set(i / width, i % width, bytes[pos] == b'1');
                        i += 1;
                    }
                    Some(b'#') => {
                        while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                            pos += 1;
                        }
                        continue;
                    }
                    Some(b) if b.is_ascii_whitespace() => {}
                    Some(_) => return Err(bad(pos, "unexpected byte in P1 raster")),
                    None => {
                        return Err(FormatError::Length {
                            offset: pos as u64,
                            needed: 1,
                        })
                    }
                }
                pos += 1;
            }
        }
        _ => return Err(bad(0, "not a P1/P4 bitmap")),
    }
    Ok(grid)
}

pub fn read_pbm(path: &Path) -> Result<Grid, FormatError> {
    decode_pbm(&read_file(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_two_by_two() {
        let g = Grid::from_rows(&["#.", ".#"]);
        assert_eq!(encode_pbm(&g, PbmMode::Binary), b"P4\n2 2\n\x80\x40".to_vec());
        assert_eq!(encode_pbm(&g, PbmMode::Ascii), b"P1\n2 2\n1 0\n0 1\n".to_vec());
    }

    #[test]
    fn round_trips_both_modes() {
        let g = Grid::random(7, 13, 0.5, 5);
        for mode in [PbmMode::Binary, PbmMode::Ascii] {
            assert_eq!(decode_pbm(&encode_pbm(&g, mode)).unwrap(), g);
        }
    }

    #[test]
    fn comments_in_header() {
        let g = decode_pbm(b"P1\n# made by hand\n3 1\n1 0 1\n").unwrap();
        assert_eq!(g.cells(), &[1, 0, 1]);
    }

    #[test]
    fn truncated_raster() {
        assert!(matches!(
            decode_pbm(b"P4\n9 2\n\x00"),
            Err(FormatError::Length { .. })
        ));
        assert!(decode_pbm(b"P2\n1 1\n0\n").is_err());
    }
}
