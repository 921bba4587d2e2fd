from enum import Enum

class EnergyVariant(str, Enum):

    """
    Enum for the closed-form energy curves
    """
    NONRECIPROCAL_GENERAL = "nonreciprocal_general"
    NONRECIPROCAL_RESONANT = "nonreciprocal_resonant"
    NONRECIPROCAL_SYMMETRIC = "nonreciprocal_symmetric"
    CHARGER_NONRECIPROCAL = "charger_nonreciprocal"
    RECIPROCAL = "reciprocal"

class Verb(str, Enum):

    """
    Enum for the command line verbs
    """
    SIMULATE = "simulate"
    CLOSED_FORM = "closed-form"
    VERIFY = "verify"
    OPTIMIZE = "optimize"
    ADVANTAGE = "advantage"
    FIGURES = "figures"

class OutputFormat(str, Enum):

    """
    Enum for the output file formats
    """
    CSV = "csv"
    JSON = "json"

class FigureId(str, Enum):

    """
    Enum for the reproducible figure bundles
    """
    FIG2 = "fig2"
    FIG3 = "fig3"
    FIG4 = "fig4"
    FIG5 = "fig5"
    CHI = "chi"
