__copyright__ = "Copyright 2026 Contributing Entities"
__license__   = """
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
"""
import csv
import json
import os

import numpy as np
import pandas as pd
import psutil

from .Error  import DimensionMismatch, ZeroReference
from .Logger import PinnLabLogger


class Util(object):
    """
    Output writers and small numeric helpers shared by the experiments.
    """
    #: Float format for every CSV we write.  Enough digits to round-trip a double.
    FLOAT_FORMAT                    = "%.17g"

    #: Supported heatmap color maps
    PPM_COLORMAPS                   = ["gray", "heat"]

    @staticmethod
    def write_dataframe(df, name, output_file, append=False):
        """
        Writes *df* to *output_file* as CSV with :py:attr:`Util.FLOAT_FORMAT`.  *name* only shows up in the log.
        With *append* and an existing file, rows are added without a header, in the column order of that
        file's header row.  Empty frames are skipped.
        """
        if len(df) == 0:
            PinnLabLogger.info("No rows of %s dataframe to write to %s" % (name, output_file))
            return

        header_row = None
        if append and os.path.exists(output_file):
            with open(output_file, 'rt') as df_file:
                df_reader  = csv.reader(df_file, delimiter=",")
                header_row = next(df_reader)

        if header_row:
            with open(output_file, "a") as df_file:
                df[header_row].to_csv(df_file, index=False, header=False, float_format=Util.FLOAT_FORMAT, lineterminator="\n")
            PinnLabLogger.debug("Appended %s dataframe to %s" % (name, output_file))
        else:
            df.to_csv(output_file, index=False, float_format=Util.FLOAT_FORMAT, lineterminator="\n")
            PinnLabLogger.info("Wrote %s dataframe to %s" % (name, output_file))

    @staticmethod
    def write_json(obj, name, output_file):
        """
        Writes *obj* as JSON with sorted keys so that identical runs produce identical files.
        Numpy scalars and arrays are converted to python types.
        """
        with open(output_file, "w") as json_file:
            json.dump(Util.to_builtin(obj), json_file, indent=2, sort_keys=True)
            json_file.write("\n")
        PinnLabLogger.info("Wrote %s to %s" % (name, output_file))

    @staticmethod
    def to_builtin(obj):
        """
        Recursively converts numpy types inside *obj* into python builtins for serialization.
        """
        if isinstance(obj, dict):
            return dict((str(key), Util.to_builtin(val)) for key, val in obj.items())
        if isinstance(obj, (list, tuple)):
            return [Util.to_builtin(val) for val in obj]
        if isinstance(obj, np.ndarray):
            return [Util.to_builtin(val) for val in obj.tolist()]
        if isinstance(obj, np.bool_):
            return bool(obj)
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        return obj

    @staticmethod
    def write_ppm(field, output_file, colormap="gray", vmin=None, vmax=None):
        """
        Writes a 2D array as a binary PPM (P6) image.  Row 0 of *field* is the top row of the image,
        so the image is ``field.shape[1]`` pixels wide and ``field.shape[0]`` pixels high.

        :param field:    2D array of values
        :param colormap: one of :py:attr:`Util.PPM_COLORMAPS`
        :param vmin:     value mapped to the low end of the colormap (default: field minimum)
        :param vmax:     value mapped to the high end of the colormap (default: field maximum)
        """
        field = np.asarray(field, dtype=np.float64)
        if field.ndim != 2:
            raise DimensionMismatch("PPM heatmaps need a 2D field, got shape %s" % str(field.shape))
        if colormap not in Util.PPM_COLORMAPS:
            raise ValueError("Unknown colormap %s; expected one of %s" % (colormap, str(Util.PPM_COLORMAPS)))

        lo = np.nanmin(field) if vmin is None else vmin
        hi = np.nanmax(field) if vmax is None else vmax
        if hi > lo:
            scaled = np.clip((field - lo)/(hi - lo), 0.0, 1.0)
        else:
            scaled = np.full(field.shape, 0.5)
        scaled = np.nan_to_num(scaled, nan=0.0)

        if colormap == "gray":
            level = np.round(255.0*scaled).astype(np.uint8)
            rgb   = np.stack([level, level, level], axis=-1)
        else:
            # blue -> white -> red
            red   = np.where(scaled < 0.5, 2.0*scaled, 1.0)
            blue  = np.where(scaled < 0.5, 1.0, 2.0*(1.0 - scaled))
            green = 1.0 - np.abs(2.0*scaled - 1.0)
            rgb   = np.round(255.0*np.stack([red, green, blue], axis=-1)).astype(np.uint8)

        height, width = field.shape
        with open(output_file, "wb") as ppm_file:
            ppm_file.write(("P6\n%d %d\n255\n" % (width, height)).encode("ascii"))
            ppm_file.write(np.ascontiguousarray(rgb).tobytes())
        PinnLabLogger.info("Wrote %dx%d heatmap to %s" % (width, height, output_file))

    @staticmethod
    def relative_l2(field_a, field_b, mask=None):
        """
        Relative discrete L2 error :math:`\\|a-b\\|_2 / \\|b\\|_2` over the nodes selected by *mask*.

        :param field_a: the approximation
        :param field_b: the reference
        :param mask:    optional boolean array of the same shape; all nodes if None
        :returns:       the relative error as a float
        """
        field_a = np.asarray(field_a, dtype=np.float64)
        field_b = np.asarray(field_b, dtype=np.float64)
        if field_a.shape != field_b.shape:
            raise DimensionMismatch("relative_l2 shapes differ: %s vs %s" % (str(field_a.shape), str(field_b.shape)))
        if mask is not None:
            mask = np.asarray(mask, dtype=bool)
            if mask.shape != field_b.shape:
                raise DimensionMismatch("relative_l2 mask shape %s does not match %s" % (str(mask.shape), str(field_b.shape)))
            field_a = field_a[mask]
            field_b = field_b[mask]

        ref_norm = np.sqrt(np.sum(field_b*field_b))
        if ref_norm == 0.0:
            raise ZeroReference("relative_l2 reference field is zero on the selected nodes")
        diff     = field_a - field_b
        return float(np.sqrt(np.sum(diff*diff))/ref_norm)

    @staticmethod
    def get_process_mem_use_bytes():
        """
        Resident set size of this process.
        """
        return psutil.Process().memory_info().rss
