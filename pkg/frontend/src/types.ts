/** Wire formats of the solver API (mirrors the server's JSON schemas). */

export type Pixel = [number, number];

export interface ProblemFile {
  points1: Pixel[];
  points2: Pixel[];
  epipole1?: number[];
  epiline1?: number[];
  image_size1?: [number, number];
  image_size2?: [number, number];
}

export interface SolveFourResponse {
  method: "four_conic";
  conic: number[];
  classification: string;
  branches: Pixel[][];
}

export interface SolveFiveResponse {
  method: "five_cremona";
  epipole: number[];
  residual_rms: number;
  alternates: number[][];
  fmatrix?: number[] | null;
}

export interface SixCandidate {
  epipole1: number[];
  epipole2: number[];
  residual_rms: number;
}

export interface SolveSixResponse {
  method: "six_linesearch";
  candidates: SixCandidate[];
  fmatrix?: number[] | null;
}

export type SolveResponse =
  | SolveFourResponse
  | SolveFiveResponse
  | SolveSixResponse;

export interface FmatrixRequest {
  points1: Pixel[];
  points2: Pixel[];
  epipole1: number[];
  epipole2: number[];
  probe_points1?: Pixel[];
}

export interface FmatrixResponse {
  fmatrix: number[];
  epipole1: number[];
  epipole2: number[];
  lines1: number[][];
  lines2: number[][];
  probe_lines2?: number[][] | null;
  mean_sym_distance_px: number;
}

export interface ApiError {
  error: { code: string; message: string; detail?: unknown };
}
