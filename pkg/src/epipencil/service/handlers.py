"""Pure request handlers shared verbatim by the CLI and the HTTP routes."""

from __future__ import annotations

import numpy as np

from ..correspondences import Correspondence, CorrSet
from ..fundamental import epipolar_transfer, f_from_epipoles_and_corr, sym_epipolar_distance
from ..projective import as_hom, display_hom
from ..solvers import LineParam, solve_five, solve_four, solve_six
from .models import (
    FmatrixRequest,
    FmatrixResponse,
    ProblemFile,
    SixCandidate,
    SolveFiveResponse,
    SolveFourResponse,
    SolveResponse,
    SolveSixResponse,
)


def _corr_from_problem(pf: ProblemFile) -> CorrSet:
    return CorrSet(pf.points1, pf.points2)


def _viewport(pf: ProblemFile, corr: CorrSet):
    if pf.image_size2 is not None:
        w, h = pf.image_size2
        return (-float(w), -float(h), 2.0 * w, 2.0 * h)
    return None


def _floats(v) -> list:
    return [float(x) for x in np.asarray(v, dtype=float)]


def solve_problem(
    pf: ProblemFile, with_fmatrix: bool = False, n_samples: int = 256
) -> SolveResponse:
    """Dispatch a problem file to the solver matching its match count."""
    corr = _corr_from_problem(pf)
    n = len(corr)
    if n == 4:
        if with_fmatrix:
            raise ValueError(
                "4 correspondences restrict the epipole to a conic; "
                "a fundamental matrix needs 5 or 6"
            )
        locus = solve_four(
            as_hom(pf.epipole1), corr, viewport=_viewport(pf, corr), n_samples=n_samples
        )
        return SolveFourResponse(
            conic=_floats(locus.conic.coefficients()),
            classification=locus.classification,
            branches=[
                [(float(p[0]), float(p[1])) for p in branch]
                for branch in locus.branches
            ],
        )
    if n == 5:
        e = as_hom(pf.epipole1)
        est = solve_five(e, corr)
        fmatrix = None
        if with_fmatrix:
            fmatrix = f_from_epipoles_and_corr(e, est.e_prime, corr).flat()
        return SolveFiveResponse(
            epipole=_floats(est.e_prime),
            residual_rms=float(est.residual_rms),
            alternates=[_floats(a) for a in est.alternates],
            fmatrix=fmatrix,
        )
    # n == 6
    size = pf.image_size1 if pf.image_size1 is not None else (640, 480)
    lp = LineParam.from_line(as_hom(pf.epiline1), size)
    roots = solve_six(lp, corr)
    fmatrix = None
    if with_fmatrix:
        best = roots[0]
        fmatrix = f_from_epipoles_and_corr(best.e, best.e_prime, corr).flat()
    return SolveSixResponse(
        candidates=[
            SixCandidate(
                epipole1=_floats(r.e),
                epipole2=_floats(r.e_prime),
                residual_rms=float(r.residual_rms),
            )
            for r in roots
        ],
        fmatrix=fmatrix,
    )


def fmatrix_from_request(req: FmatrixRequest) -> FmatrixResponse:
    """Both epipoles plus correspondences: F and the epipolar line pencils."""
    corr = CorrSet(req.points1, req.points2)
    e1 = as_hom(req.epipole1)
    e2 = as_hom(req.epipole2)
    f = f_from_epipoles_and_corr(e1, e2, corr)
    lines2 = [epipolar_transfer(f, p) for p in corr.pts1]
    lines1 = [f.m.T @ p for p in corr.pts2]
    dists = [
        sym_epipolar_distance(f, Correspondence(corr.pts1[i], corr.pts2[i]))
        for i in range(len(corr))
    ]
    probe_lines2 = None
    if req.probe_points1:
        probe_lines2 = [
            _floats(epipolar_transfer(f, as_hom(list(p)))) for p in req.probe_points1
        ]
    return FmatrixResponse(
        fmatrix=f.flat(),
        epipole1=_floats(display_hom(f.e)),
        epipole2=_floats(display_hom(f.e_prime)),
        lines1=[_floats(l) for l in lines1],
        lines2=[_floats(l) for l in lines2],
        probe_lines2=probe_lines2,
        mean_sym_distance_px=float(np.mean(dists)),
    )
