use crate::grid::Grid;

/// Packs bits MSB-first; the final byte is zero-padded.
pub fn pack_msb(bits: impl IntoIterator<Item = bool>, out: &mut Vec<u8>) {
    let mut byte = 0u8;
    let mut filled = 0;
    for bit in bits {
        byte |= (bit as u8) << (7 - filled);
        filled += 1;
        if filled == 8 {
            out.push(byte);
            byte = 0;
            filled = 0;
        }
    }
    if filled > 0 {
        out.push(byte);
    }
}

/// Payload size of one frame block, `ceil(h·w / 8)`.
pub fn frame_bytes(height: usize, width: usize) -> usize {
    (height * width).div_ceil(8)
}

pub fn pack_frame(grid: &Grid, out: &mut Vec<u8>) {
    pack_msb(grid.cells().iter().map(|&c| c != 0), out);
}

/// Inverse of [`pack_frame`]; padding bits are ignored.
pub fn unpack_frame(height: usize, width: usize, payload: &[u8]) -> Grid {
    debug_assert_eq!(payload.len(), frame_bytes(height, width));
    let cells = (0..height * width)
        .map(|i| (payload[i / 8] >> (7 - i % 8)) & 1)
        .collect();
    Grid::from_cells(height, width, cells).expect("length matches")
}
