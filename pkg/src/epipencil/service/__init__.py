from .app import create_app
from .handlers import fmatrix_from_request, solve_problem
from .models import (
    ErrorResponse,
    FmatrixRequest,
    FmatrixResponse,
    ProblemFile,
    SolveFiveResponse,
    SolveFourResponse,
    SolveResponse,
    SolveSixResponse,
)
