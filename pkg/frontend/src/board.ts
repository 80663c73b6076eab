/**
 * Board rendering from a FEN string. Deliberately rules-free: this module
 * can only parse piece placement, never generate or validate moves. Every
 * position shown in the UI comes straight from the service.
 */

export interface SquareView {
  square: string; // e.g. "e4"
  piece: string | null; // FEN letter, e.g. "N" or "p"
  glyph: string; // unicode chess glyph or ""
  light: boolean;
}

const GLYPHS: Record<string, string> = {
  K: "♔", Q: "♕", R: "♖", B: "♗", N: "♘", P: "♙",
  k: "♚", q: "♛", r: "♜", b: "♝", n: "♞", p: "♟",
};

/** 8x8 grid, row 0 = rank 8 (as drawn), from the placement field of a FEN. */
export function boardFromFen(fen: string): SquareView[][] {
  const placement = fen.split(" ")[0];
  const ranks = placement.split("/");
  if (ranks.length !== 8) {
    throw new Error(`bad FEN placement: ${placement}`);
  }
  return ranks.map((rank, row) => {
    const cells: SquareView[] = [];
    let file = 0;
    for (const ch of rank) {
      if (/[1-8]/.test(ch)) {
        for (let i = 0; i < Number(ch); i++) {
          cells.push(emptySquare(row, file++));
        }
      } else if (ch in GLYPHS) {
        cells.push({ ...emptySquare(row, file), piece: ch, glyph: GLYPHS[ch] });
        file++;
      } else {
        throw new Error(`bad FEN character: ${ch}`);
      }
    }
    if (file !== 8) {
      throw new Error(`bad FEN rank: ${rank}`);
    }
    return cells;
  });
}

function emptySquare(row: number, file: number): SquareView {
  return {
    square: "abcdefgh"[file] + String(8 - row),
    piece: null,
    glyph: "",
    light: (row + file) % 2 === 0,
  };
}

export function sideToMove(fen: string): "white" | "black" {
  return fen.split(" ")[1] === "b" ? "black" : "white";
}

/** Plain-text board, one drawn rank per line (for logs and tests). */
export function renderAscii(fen: string): string {
  return boardFromFen(fen)
    .map((row) => row.map((sq) => sq.glyph || "·").join(" "))
    .join("\n");
}
