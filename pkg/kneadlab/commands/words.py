import csv
import json

from traitlets import Unicode

from ..output import format_number, open_output
from ..schemas import OutputFormat, RunConfig, Subcommand
from ..thurston import admissible_words
from .base import BaseCommand


class WordsCommand(BaseCommand):
    name = Unicode("kneadlab-words")

    description = "Superstable kneading words realized by the family, with their parameters."

    subcommand = Subcommand.WORDS

    def run(self, config: RunConfig) -> int:
        found = admissible_words(config.r, config.max_n)
        with open_output(config.output) as stream:
            if OutputFormat(config.output_format) == OutputFormat.JSON:
                payload = [{"word": str(word), "n": len(word), "a_star": a} for word, a in found]
                stream.write(json.dumps(payload, indent=2))
                stream.write("\n")
            else:
                writer = csv.writer(stream, lineterminator="\n")
                writer.writerow(("word", "n", "a_star"))
                for word, a in found:
                    writer.writerow((str(word), len(word), format_number(a)))
        return 0
