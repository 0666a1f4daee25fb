import json


class ReportFormatter:
    """Formatter converting reports and tables to stable JSON documents"""

    @staticmethod
    def render(document):
        """Serialise a document, one trailing newline, keys in given order"""

        return json.dumps(document, indent=2) + "\n"

    @staticmethod
    def image_analysis(path, img, lsc_bits, reports):
        """Document describing the analysis of a single image"""

        return {
            'image': path,
            'width': img.width,
            'height': img.height,
            'lsc_bits': lsc_bits,
            'reports': [report.to_dict() for report in reports]
        }

    @staticmethod
    def analysis(alpha, images):
        """Document holding the analyses of one or more images"""

        return {
            'alpha': alpha,
            'images': images
        }

    @staticmethod
    def selftest(attack_class, results, mutants):
        """Document summarising the enumeration and the mutant checks"""

        uncovered = [str(other) for other in type(attack_class)
                     if other is not attack_class]
        return {
            'attack_model': str(attack_class),
            'uncovered_attack_models': uncovered,
            'uniform': all(result['uniform'] for result in results),
            'results': results,
            'mutants': mutants
        }
