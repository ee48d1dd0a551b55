from typing import List, Literal, Optional

from pydantic import BaseModel, Field


class PipDocument(BaseModel):
    elements: List[str] = Field(..., description="Element names, unique within the PIP")
    covers: List[List[str]] = Field(default_factory=list, description="Pairs [lower, upper] of the order")
    inconsistent: List[List[str]] = Field(default_factory=list, description="Unordered inconsistent pairs")


class EdgeDocument(BaseModel):
    ends: List[str] = Field(..., min_length=2, max_length=2, description="The two endpoint vertices")
    label: str = Field(..., description="Move or hyperplane label carried by the edge")


class CubeDocument(BaseModel):
    base: str = Field(..., description="Corner the cube is described from")
    labels: List[str] = Field(..., description="Edge labels at the base spanning the cube")


class ComplexDocument(BaseModel):
    vertices: List[str] = Field(..., description="Vertex names")
    edges: List[EdgeDocument] = Field(default_factory=list, description="Labelled 1-cells")
    cubes: List[CubeDocument] = Field(default_factory=list, description="Maximal cubes of dimension at least 2")
    root: Optional[str] = Field(default=None, description="Optional root vertex")


class PlanDocument(BaseModel):
    metric: Literal["l1", "linf"] = Field(..., description="Cost (l1) or time (linf) metric")
    distance: int = Field(..., ge=0, description="Number of steps of the plan")
    batches: List[List[str]] = Field(default_factory=list, description="Hyperplanes crossed at each step")
    vertices: List[List[str]] = Field(default_factory=list, description="Ideals visited, start and end included")
    states: Optional[List[str]] = Field(default=None, description="Arm words visited, when planning for the arm")
