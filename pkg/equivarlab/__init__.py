# equivarlab package

from equivarlab.liealg import LieGroup, Jet2Elem
from equivarlab.meshcover import CoverMesh
from equivarlab.repvar import Representation, Cocycle, Jet2Cocycle, ExponentialPath, ConjugationPath
from equivarlab.harmonicflow import EquivariantMap, FlowParams, FlowReport
from equivarlab.twistedhodge import HodgeComplex, TwistedCochain, FiberMetric
from equivarlab.deform import Obstruction, ObstructedDeformation
from equivarlab.energyvar import VariationReport
