def parallel_lines(line1, line2):
    return line1[0]/line1[1] == line2[0]/line2[1]
