use super::{CellState, GridError, OccupancyGrid, WorldPoint, DEFAULT_RESOLUTION};

/// Gray level at or below which a pixel counts as occupied.
pub const DEFAULT_OCCUPIED_THRESHOLD: u8 = 127;

/// Parses a binary (P5) or ASCII (P2) PGM into a grid at the default
/// resolution. Samples are rescaled to 0..=255 before thresholding, so the
/// threshold has the same meaning for any maxval.
pub fn load_pgm(bytes: &[u8], occupied_threshold: u8) -> Result<OccupancyGrid, GridError> {
    let mut cursor = Cursor { bytes, pos: 0 };
    let magic = cursor.token()?;
    let binary = match magic.as_slice() {
        b"P5" => true,
        b"P2" => false,
        other => {
            return Err(GridError::MalformedPgm(format!("unsupported magic {:?}", String::from_utf8_lossy(other))))
        }
    };
    let width = cursor.header_number("width")?;
    let height = cursor.header_number("height")?;
    let maxval = cursor.header_number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(GridError::UnsupportedMaxval(maxval));
    }
    if width == 0 || height == 0 {
        return Err(GridError::EmptyDimensions { width: width as usize, height: height as usize });
    }
    let (width, height) = (width as usize, height as usize);
    let expected = width * height;

    let mut samples = Vec::with_capacity(expected);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        match cursor.bytes.get(cursor.pos) {
            Some(b) if b.is_ascii_whitespace() => cursor.pos += 1,
            _ => return Err(GridError::MalformedPgm("missing raster separator".into())),
        }
        let payload = &cursor.bytes[cursor.pos..];
        if payload.len() < expected {
            return Err(GridError::TruncatedPgm { expected, found: payload.len() });
        }
        samples.extend(payload[..expected].iter().map(|&b| u32::from(b)));
    } else {
        while samples.len() < expected {
            match cursor.try_token()? {
                Some(tok) => samples.push(parse_number(&tok, "sample")?),
                None => return Err(GridError::TruncatedPgm { expected, found: samples.len() }),
            }
        }
    }

    let mut cells = Vec::with_capacity(expected);
    for v in samples {
        if v > maxval {
            return Err(GridError::MalformedPgm(format!("sample {v} exceeds maxval {maxval}")));
        }
        let gray = (v * 255 + maxval / 2) / maxval;
        cells.push(if gray <= u32::from(occupied_threshold) { CellState::Occupied } else { CellState::Free });
    }
    OccupancyGrid::new(width, height, DEFAULT_RESOLUTION, WorldPoint::default(), cells)
}

/// Encodes the grid as P5 with maxval 255 (occupied = 0, free = 255).
pub fn save_pgm(grid: &OccupancyGrid) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", grid.width(), grid.height());
    let mut out = Vec::with_capacity(header.len() + grid.len());
    out.extend_from_slice(header.as_bytes());
    out.extend(grid.cells().iter().map(|s| match s {
        CellState::Occupied => 0u8,
        CellState::Free => 255u8,
    }));
    out
}

/// Writes an 8-bit grayscale raster as P5.
pub(crate) fn encode_gray(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    debug_assert_eq!(pixels.len(), width * height);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn try_token(&mut self) -> Result<Option<Vec<u8>>, GridError> {
        self.skip_separators();
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        Ok((self.pos > start).then(|| self.bytes[start..self.pos].to_vec()))
    }

    fn token(&mut self) -> Result<Vec<u8>, GridError> {
        self.try_token()?.ok_or_else(|| GridError::MalformedPgm("unexpected end of header".into()))
    }

    fn header_number(&mut self, what: &str) -> Result<u32, GridError> {
        let tok = self.token()?;
        parse_number(&tok, what)
    }
}

fn parse_number(tok: &[u8], what: &str) -> Result<u32, GridError> {
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse::<u32>().ok())
        .ok_or_else(|| GridError::MalformedPgm(format!("invalid {what} {:?}", String::from_utf8_lossy(tok))))
}
