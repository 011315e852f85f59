//! Synthetic license plates: render text to a bitmap and recognize it back.
//!
//! The recognizer is deterministic template matching over a fixed 5x7 glyph
//! font: binarize, cut the image into fixed-stride cells, and pick the glyph
//! with minimum Hamming distance per cell. A plate string is all the rest of
//! the pipeline needs, and this stage sits behind a single `recognize` call
//! so a learned recognizer could be swapped in later.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const GLYPH_WIDTH: usize = 5;
pub const GLYPH_HEIGHT: usize = 7;
/// Glyph cells are 5 wide plus a single blank separator column.
pub const CELL_STRIDE: usize = GLYPH_WIDTH + 1;
pub const MAX_PLATE_LEN: usize = 10;

/// The 36 recognizable characters, in code-point order.
pub const CHARSET: &str = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";

const FONT_TEXT: &str = include_str!("../assets/font5x7.txt");

pub fn plate_char_valid(ch: char) -> bool {
    ch.is_ascii_uppercase() || ch.is_ascii_digit()
}

/// Plate string over A-Z0-9, length 1..=10.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlateText(String);

impl PlateText {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.is_empty() || text.len() > MAX_PLATE_LEN {
            return Err(Error::InvalidPlate(format!(
                "length must be 1..={MAX_PLATE_LEN}, got {} ({text:?})",
                text.len()
            )));
        }
        if let Some(bad) = text.chars().find(|&c| !plate_char_valid(c)) {
            return Err(Error::InvalidPlate(format!(
                "character {bad:?} outside A-Z0-9 in {text:?}"
            )));
        }
        Ok(Self(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 1 by construction
    }
}

impl fmt::Display for PlateText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// 5x7 binary bitmap packed into the low 35 bits, bit index `row * 5 + col`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Glyph {
    bits: u64,
}

impl Glyph {
    const MASK: u64 = (1 << (GLYPH_WIDTH * GLYPH_HEIGHT)) - 1;

    pub fn from_bits(bits: u64) -> Self {
        Self { bits: bits & Self::MASK }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        debug_assert!(row < GLYPH_HEIGHT && col < GLYPH_WIDTH);
        self.bits >> (row * GLYPH_WIDTH + col) & 1 == 1
    }

    /// Count of differing pixels among the 35.
    pub fn hamming(&self, other: &Glyph) -> u32 {
        (self.bits ^ other.bits).count_ones()
    }
}

/// Immutable bitmap font over the full charset.
#[derive(Debug, Clone)]
pub struct GlyphFont {
    glyphs: BTreeMap<char, Glyph>,
}

impl GlyphFont {
    /// Parse the font file format: 36 blocks separated by one blank line,
    /// each block a character line followed by 7 rows of 5 `.`/`#` cells.
    pub fn parse(text: &str) -> Result<Self> {
        let mut glyphs = BTreeMap::new();
        let lines: Vec<&str> = text.lines().collect();
        let mut i = 0;
        while i < lines.len() {
            if lines[i].is_empty() {
                i += 1;
                continue;
            }
            let header = lines[i];
            let mut chars = header.chars();
            let ch = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: format!("expected a single glyph character, got {header:?}"),
                    })
                }
            };
            if !plate_char_valid(ch) {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("glyph character {ch:?} outside A-Z0-9"),
                });
            }
            if glyphs.contains_key(&ch) {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("duplicate glyph for {ch:?}"),
                });
            }
            let mut bits = 0u64;
            for row in 0..GLYPH_HEIGHT {
                let lineno = i + 1 + row;
                let line = lines.get(lineno).copied().ok_or_else(|| Error::Parse {
                    line: lineno + 1,
                    msg: format!("glyph {ch:?} truncated"),
                })?;
                if line.len() != GLYPH_WIDTH {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: format!("expected {GLYPH_WIDTH} cells, got {line:?}"),
                    });
                }
                for (col, cell) in line.chars().enumerate() {
                    match cell {
                        '#' => bits |= 1 << (row * GLYPH_WIDTH + col),
                        '.' => {}
                        other => {
                            return Err(Error::Parse {
                                line: lineno + 1,
                                msg: format!("cell must be '.' or '#', got {other:?}"),
                            })
                        }
                    }
                }
            }
            glyphs.insert(ch, Glyph::from_bits(bits));
            i += 1 + GLYPH_HEIGHT;
        }
        if glyphs.len() != CHARSET.len() {
            return Err(Error::Parse {
                line: lines.len(),
                msg: format!("font must define {} glyphs, got {}", CHARSET.len(), glyphs.len()),
            });
        }
        let font = Self { glyphs };
        if let Some((a, b)) = font.first_identical_pair() {
            return Err(Error::Parse {
                line: lines.len(),
                msg: format!("glyphs {a:?} and {b:?} share a bitmap"),
            });
        }
        Ok(font)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The font shipped with the crate.
    pub fn builtin() -> &'static GlyphFont {
        static FONT: OnceLock<GlyphFont> = OnceLock::new();
        FONT.get_or_init(|| GlyphFont::parse(FONT_TEXT).expect("builtin font is well-formed"))
    }

    pub fn glyph(&self, ch: char) -> Option<Glyph> {
        self.glyphs.get(&ch).copied()
    }

    /// Characters in code-point order.
    pub fn chars(&self) -> impl Iterator<Item = char> + '_ {
        self.glyphs.keys().copied()
    }

    fn first_identical_pair(&self) -> Option<(char, char)> {
        let entries: Vec<_> = self.glyphs.iter().collect();
        for (i, (a, ga)) in entries.iter().enumerate() {
            for (b, gb) in &entries[i + 1..] {
                if ga.bits == gb.bits {
                    return Some((**a, **b));
                }
            }
        }
        None
    }

    /// Exhaustive 36x36 scan: the smallest pairwise Hamming distance and the
    /// pair that attains it. Recognition tolerates up to `(d_min - 1) / 2`
    /// flipped pixels per cell.
    pub fn min_pairwise_distance(&self) -> (u32, char, char) {
        let entries: Vec<_> = self.glyphs.iter().collect();
        let mut best = (u32::MAX, ' ', ' ');
        for (i, (a, ga)) in entries.iter().enumerate() {
            for (b, gb) in &entries[i + 1..] {
                let d = ga.hamming(gb);
                if d < best.0 {
                    best = (d, **a, **b);
                }
            }
        }
        best
    }
}

/// Grayscale image of a rendered plate, row-major, values 0..=255.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlateImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl PlateImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "pixel buffer of {} does not match {width}x{height}",
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn set_pixel(&mut self, row: usize, col: usize, value: u8) {
        self.pixels[row * self.width + col] = value;
    }

    /// FNV-1a over dimensions and pixel bytes; used to identify the captured
    /// frame in traces without storing the image.
    pub fn digest(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        for byte in (self.width as u64)
            .to_le_bytes()
            .into_iter()
            .chain((self.height as u64).to_le_bytes())
            .chain(self.pixels.iter().copied())
        {
            h ^= byte as u64;
            h = h.wrapping_mul(PRIME);
        }
        h
    }

    /// Render as the `.`/`#` grid used by the plate image file format
    /// (a font block without its header line). Pixels >= 128 print as `#`.
    pub fn to_grid_string(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for row in 0..self.height {
            for col in 0..self.width {
                out.push(if self.pixel(row, col) >= 128 { '#' } else { '.' });
            }
            out.push('\n');
        }
        out
    }

    /// Parse a `.`/`#` grid. Rows must be non-empty and all the same width.
    pub fn parse_grid(text: &str) -> Result<Self> {
        let mut width = 0;
        let mut pixels = Vec::new();
        let mut height = 0;
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                return Err(Error::Parse { line: i + 1, msg: "empty row".into() });
            }
            if i == 0 {
                width = line.len();
            } else if line.len() != width {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("row width {} differs from {width}", line.len()),
                });
            }
            for cell in line.chars() {
                match cell {
                    '#' => pixels.push(255),
                    '.' => pixels.push(0),
                    other => {
                        return Err(Error::Parse {
                            line: i + 1,
                            msg: format!("cell must be '.' or '#', got {other:?}"),
                        })
                    }
                }
            }
            height += 1;
        }
        if height == 0 {
            return Err(Error::Parse { line: 1, msg: "empty image".into() });
        }
        PlateImage::new(width, height, pixels)
    }
}

/// Draw `text` into a fresh binary image: set pixels 255, background 0,
/// glyph `i` at columns `6i..=6i+4`, one blank separator column between.
pub fn render_plate(text: &PlateText, font: &GlyphFont) -> PlateImage {
    let n = text.len();
    let width = CELL_STRIDE * n - 1;
    let mut pixels = vec![0u8; width * GLYPH_HEIGHT];
    for (i, ch) in text.as_str().chars().enumerate() {
        let glyph = font.glyph(ch).expect("charset characters always have glyphs");
        for row in 0..GLYPH_HEIGHT {
            for col in 0..GLYPH_WIDTH {
                if glyph.get(row, col) {
                    pixels[row * width + i * CELL_STRIDE + col] = 255;
                }
            }
        }
    }
    PlateImage { width, height: GLYPH_HEIGHT, pixels }
}

/// Threshold to pure black/white: pixels >= threshold become 255, the rest 0.
/// Idempotent on already-binary images for any threshold in 1..=255.
pub fn binarize(image: &PlateImage, threshold: u8) -> PlateImage {
    let pixels = image
        .pixels
        .iter()
        .map(|&p| if p >= threshold { 255 } else { 0 })
        .collect();
    PlateImage { width: image.width, height: image.height, pixels }
}

/// Cut a binarized image into 5x7 cells at the fixed stride, discarding the
/// separator columns. The width must be `6n - 1` and the height 7.
pub fn segment(image: &PlateImage) -> Result<Vec<Glyph>> {
    if image.height != GLYPH_HEIGHT {
        return Err(Error::Segmentation(format!(
            "image height {} is not {GLYPH_HEIGHT}",
            image.height
        )));
    }
    if image.width % CELL_STRIDE != GLYPH_WIDTH {
        return Err(Error::Segmentation(format!(
            "image width {} is not of the form {CELL_STRIDE}n - 1",
            image.width
        )));
    }
    let n = (image.width + 1) / CELL_STRIDE;
    let mut cells = Vec::with_capacity(n);
    for i in 0..n {
        let mut bits = 0u64;
        for row in 0..GLYPH_HEIGHT {
            for col in 0..GLYPH_WIDTH {
                if image.pixel(row, i * CELL_STRIDE + col) != 0 {
                    bits |= 1 << (row * GLYPH_WIDTH + col);
                }
            }
        }
        cells.push(Glyph::from_bits(bits));
    }
    Ok(cells)
}

/// Template-matching recognition: binarize, segment, then per cell pick the
/// character whose glyph is nearest in Hamming distance. Ties go to the
/// lowest code point (the font iterates in code-point order).
pub fn recognize(image: &PlateImage, font: &GlyphFont, threshold: u8) -> Result<PlateText> {
    let cells = segment(&binarize(image, threshold))?;
    let mut text = String::with_capacity(cells.len());
    for cell in cells {
        let mut best: Option<(u32, char)> = None;
        for ch in font.chars() {
            let d = cell.hamming(&font.glyph(ch).unwrap());
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, ch));
            }
        }
        text.push(best.expect("font is non-empty").1);
    }
    PlateText::new(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    fn font() -> &'static GlyphFont {
        GlyphFont::builtin()
    }

    fn random_plate(rng: &mut SplitMix64) -> PlateText {
        let chars: Vec<char> = CHARSET.chars().collect();
        let len = 1 + (rng.next_u64() % MAX_PLATE_LEN as u64) as usize;
        let text: String = (0..len)
            .map(|_| chars[(rng.next_u64() % 36) as usize])
            .collect();
        PlateText::new(text).unwrap()
    }

    #[test]
    fn plate_text_validation() {
        assert!(PlateText::new("LEA2465").is_ok());
        assert!(matches!(PlateText::new(""), Err(Error::InvalidPlate(_))));
        assert!(matches!(PlateText::new("abc123"), Err(Error::InvalidPlate(_))));
        assert!(matches!(PlateText::new("ABC-123"), Err(Error::InvalidPlate(_))));
        assert!(matches!(PlateText::new("ABCDEFGHIJK"), Err(Error::InvalidPlate(_))));
        assert!(PlateText::new("ABCDEFGHIJ").is_ok());
    }

    #[test]
    fn builtin_font_is_complete_and_distinct() {
        let f = font();
        assert_eq!(f.chars().count(), 36);
        assert_eq!(f.chars().collect::<String>(), CHARSET);
        let (d_min, a, b) = f.min_pairwise_distance();
        // Report d_min rather than assuming it; >= 5 gives 2-flip robustness.
        println!("font d_min = {d_min} ({a:?} vs {b:?})");
        assert!(d_min >= 5, "d_min = {d_min} between {a:?} and {b:?}");
    }

    #[test]
    fn single_glyph_render_matches_font_bitmap() {
        let text = PlateText::new("A").unwrap();
        let image = render_plate(&text, font());
        assert_eq!(image.width(), 5);
        assert_eq!(image.height(), 7);
        let glyph = font().glyph('A').unwrap();
        for row in 0..GLYPH_HEIGHT {
            for col in 0..GLYPH_WIDTH {
                let want = if glyph.get(row, col) { 255 } else { 0 };
                assert_eq!(image.pixel(row, col), want);
            }
        }
    }

    #[test]
    fn render_width_follows_layout() {
        let image = render_plate(&PlateText::new("ABC123").unwrap(), font());
        assert_eq!(image.width(), 35);
        // Separator columns stay blank.
        for row in 0..GLYPH_HEIGHT {
            for i in 0..5 {
                assert_eq!(image.pixel(row, 5 + 6 * i), 0);
            }
        }
    }

    #[test]
    fn binarize_threshold_is_inclusive_and_idempotent() {
        let image = PlateImage::new(2, 1, vec![128, 127]).unwrap();
        let bin = binarize(&image, 128);
        assert_eq!(bin.pixel(0, 0), 255);
        assert_eq!(bin.pixel(0, 1), 0);
        assert_eq!(binarize(&bin, 128), bin);

        let zeros = PlateImage::new(3, 2, vec![0; 6]).unwrap();
        assert_eq!(binarize(&zeros, 128), zeros);
    }

    #[test]
    fn segment_cuts_at_fixed_stride() {
        let image = render_plate(&PlateText::new("AB").unwrap(), font());
        assert_eq!(image.width(), 11);
        let cells = segment(&image).unwrap();
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[0], font().glyph('A').unwrap());
        assert_eq!(cells[1], font().glyph('B').unwrap());

        let single = render_plate(&PlateText::new("Q").unwrap(), font());
        assert_eq!(segment(&single).unwrap(), vec![font().glyph('Q').unwrap()]);
    }

    #[test]
    fn segment_matches_font_for_abc123() {
        let cells = segment(&render_plate(&PlateText::new("ABC123").unwrap(), font())).unwrap();
        let want: Vec<Glyph> = "ABC123".chars().map(|c| font().glyph(c).unwrap()).collect();
        assert_eq!(cells, want);
    }

    #[test]
    fn segment_rejects_bad_geometry() {
        let wide = PlateImage::new(12, 7, vec![0; 84]).unwrap();
        assert!(matches!(segment(&wide), Err(Error::Segmentation(_))));
        let short = PlateImage::new(5, 6, vec![0; 30]).unwrap();
        assert!(matches!(segment(&short), Err(Error::Segmentation(_))));
    }

    #[test]
    fn recognize_roundtrips_fixture() {
        let text = PlateText::new("LEA2465").unwrap();
        let image = render_plate(&text, font());
        assert_eq!(recognize(&image, font(), 128).unwrap(), text);
    }

    #[test]
    fn recognize_survives_two_flips_per_cell() {
        // d_min >= 5 makes any 2 flips per cell recoverable.
        let mut rng = SplitMix64::new(99);
        let text = PlateText::new("XYZ789").unwrap();
        for _ in 0..50 {
            let mut image = render_plate(&text, font());
            for cell in 0..text.len() {
                let mut flipped = std::collections::BTreeSet::new();
                while flipped.len() < 2 {
                    let row = (rng.next_u64() % GLYPH_HEIGHT as u64) as usize;
                    let col = (rng.next_u64() % GLYPH_WIDTH as u64) as usize;
                    if flipped.insert((row, col)) {
                        let c = cell * CELL_STRIDE + col;
                        let old = image.pixel(row, c);
                        image.set_pixel(row, c, if old == 0 { 255 } else { 0 });
                    }
                }
            }
            assert_eq!(recognize(&image, font(), 128).unwrap(), text);
        }
    }

    #[test]
    fn equidistant_cell_resolves_to_lowest_code_point() {
        // Build a cell exactly halfway between '0' and 'O' with every other
        // glyph strictly farther, then check the tie goes to '0'.
        let f = font();
        let zero = f.glyph('0').unwrap();
        let oh = f.glyph('O').unwrap();
        let diff = zero.bits() ^ oh.bits();
        let d = diff.count_ones();
        assert_eq!(d % 2, 0, "font must keep d('0','O') even for this case");
        let diff_bits: Vec<u32> = (0..35).filter(|&b| diff >> b & 1 == 1).collect();

        let mut chosen: Option<Glyph> = None;
        'subsets: for mask in 0u32..(1 << diff_bits.len()) {
            if mask.count_ones() != d / 2 {
                continue;
            }
            let mut bits = zero.bits();
            for (i, &b) in diff_bits.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    bits ^= 1 << b;
                }
            }
            let cell = Glyph::from_bits(bits);
            assert_eq!(cell.hamming(&zero), d / 2);
            assert_eq!(cell.hamming(&oh), d / 2);
            for ch in f.chars() {
                if ch != '0' && ch != 'O' && cell.hamming(&f.glyph(ch).unwrap()) <= d / 2 {
                    continue 'subsets;
                }
            }
            chosen = Some(cell);
            break;
        }
        let cell = chosen.expect("some midpoint cell has strict margin to the other 34 glyphs");

        let mut pixels = vec![0u8; 35];
        for row in 0..GLYPH_HEIGHT {
            for col in 0..GLYPH_WIDTH {
                if cell.get(row, col) {
                    pixels[row * GLYPH_WIDTH + col] = 255;
                }
            }
        }
        let image = PlateImage::new(5, 7, pixels).unwrap();
        assert_eq!(recognize(&image, f, 128).unwrap().as_str(), "0");
    }

    #[test]
    fn grid_file_roundtrip() {
        let image = render_plate(&PlateText::new("W4").unwrap(), font());
        let text = image.to_grid_string();
        assert_eq!(PlateImage::parse_grid(&text).unwrap(), image);
        assert!(matches!(PlateImage::parse_grid(""), Err(Error::Parse { .. })));
        assert!(matches!(PlateImage::parse_grid("##\n#"), Err(Error::Parse { .. })));
        assert!(matches!(PlateImage::parse_grid("#x#"), Err(Error::Parse { .. })));
    }

    #[test]
    fn font_parser_rejects_malformed_input() {
        // Duplicate glyph.
        let mut blocks = Vec::new();
        for ch in CHARSET.chars().take(35) {
            blocks.push(format!("{ch}\n#....\n.....\n.....\n.....\n.....\n.....\n....."));
        }
        blocks.push("0\n.####\n.....\n.....\n.....\n.....\n.....\n.....".to_string());
        let dup = blocks.join("\n\n");
        assert!(matches!(GlyphFont::parse(&dup), Err(Error::Parse { .. })));

        // Wrong row width.
        let bad = "A\n####\n.....\n.....\n.....\n.....\n.....\n.....";
        assert!(matches!(GlyphFont::parse(bad), Err(Error::Parse { .. })));

        // Wrong glyph count.
        let one = "A\n#....\n.....\n.....\n.....\n.....\n.....\n.....";
        assert!(matches!(GlyphFont::parse(one), Err(Error::Parse { .. })));
    }

    #[test]
    fn font_file_roundtrip_through_parser() {
        // Re-serialize the builtin font by hand and parse it back.
        let f = font();
        let mut out = String::new();
        for (i, ch) in f.chars().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let glyph = f.glyph(ch).unwrap();
            out.push(ch);
            out.push('\n');
            for row in 0..GLYPH_HEIGHT {
                for col in 0..GLYPH_WIDTH {
                    out.push(if glyph.get(row, col) { '#' } else { '.' });
                }
                out.push('\n');
            }
        }
        let reparsed = GlyphFont::parse(&out).unwrap();
        for ch in CHARSET.chars() {
            assert_eq!(reparsed.glyph(ch), f.glyph(ch));
        }
    }

    proptest! {
        // Render/recognize identity over random valid texts.
        #[test]
        fn roundtrip_identity(seed in any::<u64>()) {
            let mut rng = SplitMix64::new(seed);
            let text = random_plate(&mut rng);
            let image = render_plate(&text, font());
            prop_assert_eq!(recognize(&image, font(), 128).unwrap(), text.clone());
            prop_assert_eq!(segment(&image).unwrap().len(), text.len());
        }
    }
}
