//! A 5x7 uppercase bitmap font used to rasterize the text masks.

pub const GLYPH_W: usize = 5;
pub const GLYPH_H: usize = 7;

// One row per string, '#' = ink.
const GLYPHS: [[&str; GLYPH_H]; 26] = [
    [" ### ", "#   #", "#   #", "#####", "#   #", "#   #", "#   #"], // A
    ["#### ", "#   #", "#   #", "#### ", "#   #", "#   #", "#### "], // B
    [" ### ", "#   #", "#    ", "#    ", "#    ", "#   #", " ### "], // C
    ["#### ", "#   #", "#   #", "#   #", "#   #", "#   #", "#### "], // D
    ["#####", "#    ", "#    ", "#### ", "#    ", "#    ", "#####"], // E
    ["#####", "#    ", "#    ", "#### ", "#    ", "#    ", "#    "], // F
    [" ### ", "#   #", "#    ", "# ###", "#   #", "#   #", " ####"], // G
    ["#   #", "#   #", "#   #", "#####", "#   #", "#   #", "#   #"], // H
    [" ### ", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### "], // I
    ["  ###", "   # ", "   # ", "   # ", "   # ", "#  # ", " ##  "], // J
    ["#   #", "#  # ", "# #  ", "##   ", "# #  ", "#  # ", "#   #"], // K
    ["#    ", "#    ", "#    ", "#    ", "#    ", "#    ", "#####"], // L
    ["#   #", "## ##", "# # #", "# # #", "#   #", "#   #", "#   #"], // M
    ["#   #", "#   #", "##  #", "# # #", "#  ##", "#   #", "#   #"], // N
    [" ### ", "#   #", "#   #", "#   #", "#   #", "#   #", " ### "], // O
    ["#### ", "#   #", "#   #", "#### ", "#    ", "#    ", "#    "], // P
    [" ### ", "#   #", "#   #", "#   #", "# # #", "#  # ", " ## #"], // Q
    ["#### ", "#   #", "#   #", "#### ", "# #  ", "#  # ", "#   #"], // R
    [" ####", "#    ", "#    ", " ### ", "    #", "    #", "#### "], // S
    ["#####", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", "  #  "], // T
    ["#   #", "#   #", "#   #", "#   #", "#   #", "#   #", " ### "], // U
    ["#   #", "#   #", "#   #", "#   #", "#   #", " # # ", "  #  "], // V
    ["#   #", "#   #", "#   #", "# # #", "# # #", "# # #", " # # "], // W
    ["#   #", "#   #", " # # ", "  #  ", " # # ", "#   #", "#   #"], // X
    ["#   #", "#   #", " # # ", "  #  ", "  #  ", "  #  ", "  #  "], // Y
    ["#####", "    #", "   # ", "  #  ", " #   ", "#    ", "#####"], // Z
];

/// Ink at glyph cell `(col, row)`; anything outside `A..=Z` is blank.
pub fn ink(ch: char, col: usize, row: usize) -> bool {
    if !ch.is_ascii_uppercase() || col >= GLYPH_W || row >= GLYPH_H {
        return false;
    }
    GLYPHS[(ch as u8 - b'A') as usize][row].as_bytes()[col] == b'#'
}

/// Width in pixels of a glyph scaled to `height` pixels.
pub fn scaled_width(height: usize) -> usize {
    ((height * GLYPH_W) as f64 / GLYPH_H as f64).round().max(1.0) as usize
}

/// Call `mark(x, y)` for every ink pixel of `ch` drawn with its top-left at
/// `(x0, y0)` and scaled (nearest neighbour) to `height` pixels.
pub fn stamp(ch: char, x0: i64, y0: i64, height: usize, mut mark: impl FnMut(i64, i64)) {
    let width = scaled_width(height);
    for py in 0..height {
        let row = py * GLYPH_H / height;
        for px in 0..width {
            let col = px * GLYPH_W / width;
            if ink(ch, col, row) {
                mark(x0 + px as i64, y0 + py as i64);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glyph_rows_are_well_formed() {
        for g in GLYPHS.iter() {
            for row in g {
                assert_eq!(row.len(), GLYPH_W);
            }
        }
    }

    #[test]
    fn stamping_scales() {
        let mut n7 = 0;
        stamp('L', 0, 0, 7, |_, _| n7 += 1);
        assert_eq!(n7, 11);
        let mut n14 = 0;
        stamp('L', 0, 0, 14, |_, _| n14 += 1);
        assert_eq!(n14, 44);
        let mut blank = 0;
        stamp(' ', 0, 0, 12, |_, _| blank += 1);
        assert_eq!(blank, 0);
    }
}
